#include "hsred/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include <Eigen/Dense>

namespace hsred {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); i++) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// portable deterministic uniform in [-0.5, 0.5)
std::vector<double> seeded_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<double> v(n);
    for (double &x : v) x = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
    return v;
}

// largest-magnitude component made positive, first occurrence on ties
void fix_sign(std::vector<double> &v) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < v.size(); i++)
        if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    if (v[imax] < 0.0)
        for (double &x : v) x = -x;
}

struct LanczosOutcome {
    bool converged = false;
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
    std::vector<double> residuals;
    int iterations = 0;
    bool degenerate_tail = false;
};

LanczosOutcome lanczos_attempt(const MatVec &op, std::size_t n, const SolverConfig &cfg,
                               std::vector<double> q1) {
    const int k = std::min<std::size_t>(cfg.k, n);
    const int m_max = std::min<std::size_t>(std::max(cfg.max_iter, k), n);
    const int k_probe = std::min<std::size_t>(k + 1, n); // one extra for the degeneracy flag

    std::vector<std::vector<double>> q; // Krylov basis, kept for reorthogonalization
    std::vector<double> alpha, beta;    // tridiagonal coefficients

    if (!(norm(q1) > 0.0)) q1 = seeded_vector(n, cfg.seed);
    {
        const double nn = norm(q1);
        for (double &x : q1) x /= nn;
    }
    q.push_back(std::move(q1));

    std::vector<double> w(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small;

    LanczosOutcome out;
    std::vector<double> ritz;      // current Ritz values (k_probe lowest)
    std::vector<double> bounds;    // residual bounds per Ritz value
    Eigen::MatrixXd small_vecs;

    int m = 0;
    while (m < m_max) {
        op(q[m], w);
        if (m > 0)
            for (std::size_t i = 0; i < n; i++) w[i] -= beta[m - 1] * q[m - 1][i];
        const double a = dot(w, q[m]);
        alpha.push_back(a);
        for (std::size_t i = 0; i < n; i++) w[i] -= a * q[m][i];
        // full reorthogonalization, two classical Gram-Schmidt passes
        for (int pass = 0; pass < 2; pass++)
            for (int j = 0; j <= m; j++) {
                const double c = dot(w, q[j]);
                if (c == 0.0) continue;
                for (std::size_t i = 0; i < n; i++) w[i] -= c * q[j][i];
            }
        const double b = norm(w);
        m++;

        // Ritz values and residual bounds of the current tridiagonal
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; i++) {
            t(i, i) = alpha[i];
            if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        small.compute(t);
        const int avail = std::min(m, k_probe);
        ritz.assign(small.eigenvalues().data(), small.eigenvalues().data() + avail);
        bounds.resize(avail);
        for (int i = 0; i < avail; i++) bounds[i] = std::abs(b * small.eigenvectors()(m - 1, i));
        small_vecs = small.eigenvectors().leftCols(avail);

        const bool space_exhausted = m >= static_cast<int>(n);
        bool done = m >= k_probe;
        for (int i = 0; i < std::min(avail, k) && done; i++)
            if (bounds[i] > cfg.tol) done = false;
        if (done || space_exhausted) {
            out.converged = true;
            break;
        }
        if (b <= 1e-14) {
            // invariant subspace: continue from a fresh orthogonalized vector
            std::vector<double> fresh = seeded_vector(n, cfg.seed + m);
            for (int pass = 0; pass < 2; pass++)
                for (const auto &qi : q) {
                    const double c = dot(fresh, qi);
                    for (std::size_t i = 0; i < n; i++) fresh[i] -= c * qi[i];
                }
            const double fn = norm(fresh);
            if (fn <= 1e-14) break; // nothing left to add
            for (double &x : fresh) x /= fn;
            beta.push_back(0.0);
            q.push_back(std::move(fresh));
        } else {
            beta.push_back(b);
            std::vector<double> next(n);
            for (std::size_t i = 0; i < n; i++) next[i] = w[i] / b;
            q.push_back(std::move(next));
        }
    }
    out.iterations = m;

    // assemble Ritz vectors in the original space
    const int avail = static_cast<int>(ritz.size());
    const int report = std::min(avail, k);
    out.values.assign(ritz.begin(), ritz.begin() + report);
    for (int col = 0; col < report; col++) {
        std::vector<double> v(n, 0.0);
        for (int j = 0; j < m; j++) {
            const double c = small_vecs(j, col);
            for (std::size_t i = 0; i < n; i++) v[i] += c * q[j][i];
        }
        const double vn = norm(v);
        for (double &x : v) x /= vn;
        fix_sign(v);
        out.vectors.push_back(std::move(v));
    }
    out.residuals.resize(report);
    for (int i = 0; i < report; i++) {
        op(out.vectors[i], w);
        double r = 0.0;
        for (std::size_t j = 0; j < n; j++) {
            const double d = w[j] - out.values[i] * out.vectors[i][j];
            r += d * d;
        }
        out.residuals[i] = std::sqrt(r);
    }
    if (avail > report && std::abs(ritz[report] - ritz[report - 1]) < 1e-9) {
        out.degenerate_tail = true;
        // report the partner value as well so callers can see the pair
        std::vector<double> v(n, 0.0);
        for (int j = 0; j < m; j++) {
            const double c = small_vecs(j, report);
            for (std::size_t i = 0; i < n; i++) v[i] += c * q[j][i];
        }
        const double vn = norm(v);
        for (double &x : v) x /= vn;
        fix_sign(v);
        op(v, w);
        double r = 0.0;
        for (std::size_t j = 0; j < n; j++) {
            const double d = w[j] - ritz[report] * v[j];
            r += d * d;
        }
        out.values.push_back(ritz[report]);
        out.vectors.push_back(std::move(v));
        out.residuals.push_back(std::sqrt(r));
    }
    // final residual check against the explicitly computed residuals
    if (out.converged)
        for (int i = 0; i < report; i++)
            if (out.residuals[i] > 10.0 * cfg.tol) out.converged = false;
    return out;
}

} // namespace

EigenSolution lanczos_lowest(const MatVec &op, std::size_t n, const SolverConfig &cfg,
                             std::span<const double> warm_start) {
    if (n == 0) throw std::invalid_argument("lanczos_lowest: empty operator");
    if (cfg.k < 1 || !(cfg.tol > 0.0))
        throw std::invalid_argument("lanczos_lowest: bad solver config");

    bool warm_failed = false;
    LanczosOutcome out;
    if (!warm_start.empty()) {
        if (warm_start.size() != n)
            throw std::invalid_argument("lanczos_lowest: warm start length mismatch");
        out = lanczos_attempt(op, n, cfg, std::vector<double>(warm_start.begin(), warm_start.end()));
        if (!out.converged) warm_failed = true;
    }
    if (warm_start.empty() || warm_failed)
        out = lanczos_attempt(op, n, cfg, seeded_vector(n, cfg.seed));
    if (!out.converged)
        throw SolverFailure("lanczos_lowest: no convergence within the iteration cap",
                            out.residuals, out.iterations);

    EigenSolution sol;
    sol.values = std::move(out.values);
    sol.vectors = std::move(out.vectors);
    sol.residuals = std::move(out.residuals);
    sol.iterations = out.iterations;
    sol.degenerate_tail = out.degenerate_tail;
    sol.warm_start_failed = warm_failed;
    return sol;
}

EigenSolution dense_lowest(const DenseMatrix &h, int k) {
    if (h.rows != h.cols || h.rows == 0)
        throw std::invalid_argument("dense_lowest: matrix must be square and non-empty");
    const std::size_t n = h.rows;
    const int report = std::min<std::size_t>(std::max(k, 1), n);
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; i++)
        for (std::size_t j = 0; j < n; j++) m(i, j) = h(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);

    EigenSolution sol;
    sol.iterations = 0;
    for (int c = 0; c < report; c++) {
        sol.values.push_back(es.eigenvalues()(c));
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; i++) v[i] = es.eigenvectors()(i, c);
        fix_sign(v);
        Eigen::Map<Eigen::VectorXd> vm(v.data(), n);
        sol.residuals.push_back((m * vm - sol.values.back() * vm).norm());
        sol.vectors.push_back(std::move(v));
    }
    if (static_cast<std::size_t>(report) < n &&
        std::abs(es.eigenvalues()(report) - es.eigenvalues()(report - 1)) < 1e-9) {
        sol.degenerate_tail = true;
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; i++) v[i] = es.eigenvectors()(i, report);
        fix_sign(v);
        sol.values.push_back(es.eigenvalues()(report));
        Eigen::Map<Eigen::VectorXd> vm(v.data(), n);
        sol.residuals.push_back((m * vm - sol.values.back() * vm).norm());
        sol.vectors.push_back(std::move(v));
    }
    return sol;
}

EigenSolution solve_lowest(const SplitHamiltonian &h, const SolverConfig &cfg,
                           std::span<const double> warm_start) {
    if (h.dim() < static_cast<std::size_t>(cfg.dense_threshold)) return dense_lowest(h.dense(), cfg.k);
    MatVec op = [&h](std::span<const double> x, std::span<double> y) { h.apply(x, y); };
    return lanczos_lowest(op, h.dim(), cfg, warm_start);
}

} // namespace hsred
