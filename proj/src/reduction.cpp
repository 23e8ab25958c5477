#include "hsred/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hsred/observables.hpp"

namespace hsred {

std::string flag_names(unsigned flags) {
    static const std::pair<unsigned, const char *> table[] = {
        {kFlagNoRealRoot, "no-real-root"},
        {kFlagInstability, "instability"},
        {kFlagWarmStartFailed, "warm-start-failed"},
    };
    std::string s;
    for (const auto &[bit, name] : table)
        if (flags & bit) {
            if (!s.empty()) s += ';';
            s += name;
        }
    return s;
}

RenormalizationInputs feshbach_coefficients(const SplitHamiltonian &h,
                                            std::span<const double> psi1, double lambda1,
                                            std::size_t elim) {
    const std::size_t n = h.dim();
    if (psi1.size() != n)
        throw std::invalid_argument("feshbach_coefficients: ground vector length mismatch");
    if (elim >= n) throw std::invalid_argument("feshbach_coefficients: bad eliminated index");
    if (n < 2) throw std::invalid_argument("feshbach_coefficients: nothing to keep");

    double pnorm2 = 0.0;
    for (std::size_t i = 0; i < n; i++)
        if (i != elim) pnorm2 += psi1[i] * psi1[i];
    const double pnorm = std::sqrt(pnorm2);
    if (!(pnorm > 1e-12))
        throw std::invalid_argument(
            "feshbach_coefficients: degenerate projection, ground state lives on the "
            "eliminated state");

    // phi as a full-length vector with the eliminated slot zeroed: full
    // matvecs then agree exactly with the P-restricted ones.
    std::vector<double> phi(psi1.begin(), psi1.end());
    phi[elim] = 0.0;
    for (double &x : phi) x /= pnorm;

    RenormalizationInputs in;
    in.lambda1 = lambda1;
    in.g_prev = h.g();
    in.d0 = h.h0_diag(elim);
    in.d1 = h.h1_diag(elim);

    const auto row = h.couplings_below(elim, n);
    for (std::size_t k = 0; k < row.idx.size(); k++) {
        in.v0 += phi[row.idx[k]] * row.h0[k];
        in.v1 += phi[row.idx[k]] * row.h1[k];
    }

    std::vector<double> y(n);
    h.apply_h0(phi, y);
    for (std::size_t i = 0; i < n; i++) in.a0 += phi[i] * y[i];
    h.apply_h1(phi, y);
    for (std::size_t i = 0; i < n; i++) in.a1 += phi[i] * y[i];
    return in;
}

RenormResult solve_renormalization(const RenormalizationInputs &in) {
    const double l = in.lambda1;
    const double alpha = in.v1 * in.v1 - in.a1 * in.d1;
    const double beta =
        2.0 * in.v0 * in.v1 + in.a1 * (l - in.d0) - in.a0 * in.d1 + l * in.d1;
    const double gamma = in.v0 * in.v0 + (in.a0 - l) * (l - in.d0);

    const double scale = std::max({std::abs(l), std::abs(in.d0), std::abs(in.d1),
                                   std::abs(in.a0), std::abs(in.a1), std::abs(in.v0),
                                   std::abs(in.v1), 1.0});
    if (std::abs(alpha) < 1e-14 * scale * scale && std::abs(beta) < 1e-14 * scale * scale &&
        std::abs(gamma) < 1e-14 * scale * scale)
        return {in.g_prev, true}; // indeterminate equation

    double r1, r2;
    if (std::abs(alpha) < 1e-14 * std::max(std::abs(beta), 1.0)) {
        if (beta == 0.0) return {in.g_prev, true};
        r1 = r2 = -gamma / beta; // linear regime
    } else {
        const double disc = beta * beta - 4.0 * alpha * gamma;
        if (disc < 0.0) return {in.g_prev, true};
        const double sq = std::sqrt(disc);
        const double q = beta >= 0.0 ? -0.5 * (beta + sq) : -0.5 * (beta - sq);
        r1 = q / alpha;
        r2 = q != 0.0 ? gamma / q : r1;
    }
    const double dist1 = std::abs(r1 - in.g_prev), dist2 = std::abs(r2 - in.g_prev);
    double g_new;
    if (dist1 < dist2)
        g_new = r1;
    else if (dist2 < dist1)
        g_new = r2;
    else
        g_new = std::min(r1, r2); // exact tie
    return {g_new, false};
}

bool detect_instability(std::span<const ReductionStep> steps, double p_abort,
                        double g_jump_abort) {
    if (steps.empty()) throw std::invalid_argument("detect_instability: empty trace");
    const ReductionStep &last = steps.back();
    for (double p : last.p)
        if (p > p_abort) return true;
    if (steps.size() >= 2) {
        const double g_prev = steps[steps.size() - 2].g;
        if (g_prev != 0.0) {
            const double ratio = std::abs(last.g / g_prev);
            if (ratio > g_jump_abort || ratio < 1.0 / g_jump_abort) return true;
        }
    }
    if (steps.size() >= 3) {
        bool all = true;
        for (std::size_t k = steps.size() - 3; k < steps.size(); k++)
            if (!(steps[k].flags & kFlagNoRealRoot)) all = false;
        if (all) return true;
    }
    return false;
}

namespace {

// Cauchy interlacing for the principal submatrix, on values rescaled back
// to the pre-renormalization coupling: old_i - slack <= new_i <= old_{i+1} + slack.
bool interlace_ok(const std::vector<double> &old_values,
                  const std::vector<double> &new_values, double rescale) {
    const std::size_t k = std::min(old_values.size(), new_values.size());
    for (std::size_t i = 0; i < k; i++) {
        const double v = new_values[i] * rescale;
        const double slack = 1e-8 * std::max(1.0, std::abs(old_values[i]));
        if (v < old_values[i] - slack) return false;
        if (i + 1 < old_values.size() && v > old_values[i + 1] + slack) return false;
    }
    return true;
}

ReductionStep make_step(std::size_t n, double g, const EigenSolution &sol, int L,
                        const std::array<double, 4> &e_ref, bool is_reference,
                        double epsilon, unsigned flags) {
    ReductionStep st;
    st.n = n;
    st.g = g;
    const std::size_t have = std::min<std::size_t>(sol.values.size(), 4);
    for (std::size_t i = 0; i < have; i++) {
        st.lambda[i] = sol.values[i];
        st.e[i] = sol.values[i] / (2.0 * L);
        st.p[i] = is_reference ? 0.0 : deviation_p(e_ref[i], st.e[i]);
    }
    st.entropy = entropy_per_site(sol.vectors[0], L);
    st.relevant_count = relevant_amplitudes(sol.vectors[0], epsilon);
    st.flags = flags | (sol.warm_start_failed ? kFlagWarmStartFailed : 0u);
    return st;
}

} // namespace

ReductionTrace run_reduction(const ReductionConfig &cfg, const StepCallback &on_step) {
    if (cfg.n_floor < static_cast<std::size_t>(std::max(cfg.solver.k, 2)))
        throw std::invalid_argument("run_reduction: n_floor below the solver block size");
    if (!(cfg.epsilon > 0.0) || !(cfg.p_abort > 0.0) || !(cfg.g_jump_abort > 1.0))
        throw std::invalid_argument("run_reduction: thresholds must be positive");

    const Basis canonical = cfg.scheme == Scheme::SU2
                                ? build_su2_basis(cfg.L, cfg.m_tot)
                                : build_so4_basis(cfg.L, cfg.m_tot);
    if (canonical.size() < cfg.n_floor)
        throw std::invalid_argument("run_reduction: sector smaller than n_floor");

    // With H0 = 0 the diagonal order is invariant under rescaling of g, so
    // the basis is ordered once and eliminations always drop the last state.
    SplitHamiltonian h = assemble(canonical, cfg.couplings);
    const Basis ordered = order_by_diagonal(canonical, h.full_diagonal());
    h = assemble(ordered, cfg.couplings);

    ReductionTrace trace;
    trace.scheme = cfg.scheme;
    trace.L = cfg.L;
    trace.m_tot = cfg.m_tot;
    trace.couplings = cfg.couplings;
    trace.initial_dim = h.dim();

    EigenSolution sol = solve_lowest(h, cfg.solver);
    const double lambda_target = cfg.lambda_target.value_or(sol.values[0]);
    trace.lambda_target = lambda_target;

    std::array<double, 4> e_ref{};
    for (std::size_t i = 0; i < std::min<std::size_t>(sol.values.size(), 4); i++)
        e_ref[i] = sol.values[i] / (2.0 * cfg.L);

    trace.steps.push_back(
        make_step(h.dim(), h.g(), sol, cfg.L, e_ref, true, cfg.epsilon, 0));
    trace.stop_reason = StopReason::FloorReached;
    if (on_step) on_step(trace.steps.back());

    while (h.dim() > cfg.n_floor) {
        const std::size_t n = h.dim();
        std::size_t elim = n - 1;
        if (cfg.eliminate_smallest_amplitude) {
            elim = 0;
            for (std::size_t i = 1; i < n; i++)
                if (std::abs(sol.vectors[0][i]) < std::abs(sol.vectors[0][elim])) elim = i;
        }

        unsigned flags = 0;
        const auto inputs = feshbach_coefficients(h, sol.vectors[0], lambda_target, elim);
        const auto renorm = solve_renormalization(inputs);
        const double g_new = renorm.g_new;
        if (renorm.no_real_root) flags |= kFlagNoRealRoot;

        // Warm start: projected combination of all tracked eigenvectors. A
        // pure ground-vector seed can be trapped in an exact symmetry block
        // of the basis (the rung representation conserves singlet parity)
        // and silently lose the excited levels.
        std::vector<double> warm(n - 1, 0.0);
        const std::size_t n_track = std::min<std::size_t>(sol.vectors.size(), 4);
        for (std::size_t v = 0; v < n_track; v++) {
            std::size_t w = 0;
            for (std::size_t i = 0; i < n; i++)
                if (i != elim) warm[w++] += sol.vectors[v][i];
        }

        const double g_old = h.g();
        const std::vector<double> old_values = sol.values;
        h = h.restricted_without(elim);
        h.set_g(g_new);
        const bool krylov_path =
            h.dim() >= static_cast<std::size_t>(cfg.solver.dense_threshold);
        try {
            sol = solve_lowest(h, cfg.solver, warm);
            // Interlacing guard: with H0 = 0 the reduced matrix rescales
            // with g, so the one-state Cauchy bounds apply to the rescaled
            // values. A violation means the warm solve skipped an interior
            // eigenvalue; retry from the seeded random start.
            if (krylov_path && h.h0_is_zero() && g_new != 0.0 && g_old / g_new > 0.0 &&
                !interlace_ok(old_values, sol.values, g_old / g_new)) {
                sol = solve_lowest(h, cfg.solver);
                sol.warm_start_failed = true;
            }
        } catch (const SolverFailure &) {
            trace.stop_reason = StopReason::SolverFailure;
            break;
        }

        trace.steps.push_back(
            make_step(h.dim(), g_new, sol, cfg.L, e_ref, false, cfg.epsilon, flags));
        const bool unstable =
            detect_instability(trace.steps, cfg.p_abort, cfg.g_jump_abort);
        if (unstable) {
            trace.steps.back().flags |= kFlagInstability;
            trace.stop_reason = StopReason::Instability;
        }
        if (on_step) on_step(trace.steps.back());
        if (unstable) break;
    }
    return trace;
}

std::size_t deepest_stable_n(const ReductionTrace &trace, double p1_threshold) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const ReductionStep &st : trace.steps)
        if (st.p[0] <= p1_threshold && st.n < best) best = st.n;
    return best;
}

} // namespace hsred
