#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>

#include "hsred/basis.hpp"
#include "hsred/couplings.hpp"
#include "hsred/eigensolver.hpp"
#include "hsred/hamiltonian.hpp"

using namespace hsred;

namespace {

MatVec dense_op(const DenseMatrix &m) {
    return [&m](std::span<const double> x, std::span<double> y) {
        for (std::size_t i = 0; i < m.rows; i++) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m.cols; j++) acc += m(i, j) * x[j];
            y[i] = acc;
        }
    };
}

DenseMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; i++)
        for (std::size_t j = i; j < n; j++) m(i, j) = m(j, i) = u(gen);
    return m;
}

} // namespace

TEST_CASE("dense oracle on trivial matrices") {
    DenseMatrix flip(2, 2);
    flip(0, 1) = flip(1, 0) = 1.0;
    const auto sol = dense_lowest(flip, 2);
    CHECK(sol.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(sol.values[1] == doctest::Approx(1.0).epsilon(1e-14));

    DenseMatrix c(1, 1);
    c(0, 0) = -3.25;
    CHECK(dense_lowest(c, 1).values[0] == -3.25);
}

TEST_CASE("dense oracle residuals on a random matrix") {
    const DenseMatrix m = random_symmetric(50, 42);
    const auto sol = dense_lowest(m, 4);
    REQUIRE(sol.values.size() >= 4);
    for (double r : sol.residuals) CHECK(r <= 1e-12);
    // orthonormality
    for (std::size_t a = 0; a < 4; a++)
        for (std::size_t b = 0; b <= a; b++) {
            double dot = 0.0;
            for (std::size_t i = 0; i < 50; i++) dot += sol.vectors[a][i] * sol.vectors[b][i];
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-10);
        }
}

TEST_CASE("lanczos on the identity") {
    DenseMatrix id(8, 8);
    for (std::size_t i = 0; i < 8; i++) id(i, i) = 1.0;
    SolverConfig cfg;
    cfg.k = 1;
    const auto sol = lanczos_lowest(dense_op(id), 8, cfg);
    CHECK(sol.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    double nrm = 0.0;
    for (double x : sol.vectors[0]) nrm += x * x;
    CHECK(nrm == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("lanczos on an ascending diagonal") {
    const std::size_t n = 30;
    DenseMatrix d(n, n);
    for (std::size_t i = 0; i < n; i++) d(i, i) = static_cast<double>(i + 1);
    SolverConfig cfg;
    cfg.k = 2;
    const auto sol = lanczos_lowest(dense_op(d), n, cfg);
    CHECK(sol.values[0] == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(sol.values[1] == doctest::Approx(2.0).epsilon(1e-11));
    for (double r : sol.residuals) CHECK(r <= 1e-10);
}

TEST_CASE("lanczos agrees with the dense oracle on the L=4 ladder") {
    const CouplingSet c = CouplingSet::make(5.5, 5.0, 3.0);
    const auto h = assemble_su2(build_su2_basis(4, 0), c);
    const auto dense = dense_lowest(h.dense(), 4);
    SolverConfig cfg;
    const MatVec op = [&h](std::span<const double> x, std::span<double> y) { h.apply(x, y); };
    const auto krylov = lanczos_lowest(op, h.dim(), cfg);
    for (int i = 0; i < 4; i++)
        CHECK(std::abs(krylov.values[i] - dense.values[i]) <=
              1e-9 * std::abs(dense.values[i]));
}

TEST_CASE("determinism under a fixed seed") {
    const DenseMatrix m = random_symmetric(40, 3);
    SolverConfig cfg;
    cfg.seed = 1234;
    const auto a = lanczos_lowest(dense_op(m), 40, cfg);
    const auto b = lanczos_lowest(dense_op(m), 40, cfg);
    REQUIRE(a.values.size() == b.values.size());
    CHECK(std::memcmp(a.values.data(), b.values.data(),
                      a.values.size() * sizeof(double)) == 0);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("ground vector sign convention") {
    const DenseMatrix m = random_symmetric(25, 9);
    const auto sol = dense_lowest(m, 3);
    for (const auto &v : sol.vectors) {
        std::size_t imax = 0;
        for (std::size_t i = 1; i < v.size(); i++)
            if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
        CHECK(v[imax] > 0.0);
    }
}

TEST_CASE("non-convergence carries best-so-far residuals") {
    const DenseMatrix m = random_symmetric(60, 17);
    SolverConfig cfg;
    cfg.max_iter = 5;
    cfg.tol = 1e-14;
    try {
        lanczos_lowest(dense_op(m), 60, cfg);
        FAIL("expected SolverFailure");
    } catch (const SolverFailure &e) {
        CHECK(e.iterations == 5);
        CHECK(!e.residuals.empty());
        for (double r : e.residuals) CHECK(r > 0.0);
    }
}

TEST_CASE("warm start from the exact eigenvector converges fast") {
    const CouplingSet c = CouplingSet::make(15.0, 5.0, 3.0);
    const auto h = assemble_su2(build_su2_basis(3, 0), c);
    const auto dense = dense_lowest(h.dense(), 1);
    SolverConfig cfg;
    cfg.k = 1;
    const MatVec op = [&h](std::span<const double> x, std::span<double> y) { h.apply(x, y); };
    const auto cold = lanczos_lowest(op, h.dim(), cfg);
    const auto warm = lanczos_lowest(op, h.dim(), cfg, dense.vectors[0]);
    CHECK(warm.iterations <= cold.iterations);
    CHECK(warm.iterations <= 3);
    CHECK(!warm.warm_start_failed);
    CHECK(std::abs(warm.values[0] - dense.values[0]) <= 1e-9 * std::abs(dense.values[0]));
}

TEST_CASE("degenerate pair is reported and flagged") {
    DenseMatrix d(6, 6);
    const double vals[6] = {-2.0, -1.0, -0.5, -0.5, 3.0, 4.0};
    for (std::size_t i = 0; i < 6; i++) d(i, i) = vals[i];
    const auto sol = dense_lowest(d, 3); // lambda_3 == lambda_4
    CHECK(sol.degenerate_tail);
    REQUIRE(sol.values.size() == 4); // the partner value is appended
    CHECK(sol.values[3] == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("solve_lowest dispatches on the dense threshold") {
    // J_l != J_c keeps the low spectrum non-degenerate; a single-vector
    // Krylov space holds one copy of each degenerate level only
    const CouplingSet c = CouplingSet::make(2.0, 1.0, 0.5);
    const auto h = assemble_su2(build_su2_basis(2, 0), c); // dim 6 < 64
    SolverConfig cfg;
    const auto sol = solve_lowest(h, cfg);
    CHECK(sol.iterations == 0); // dense path
    SolverConfig tiny = cfg;
    tiny.dense_threshold = 2;
    const auto krylov = solve_lowest(h, tiny);
    CHECK(krylov.iterations > 0);
    for (int i = 0; i < 4; i++)
        CHECK(std::abs(sol.values[i] - krylov.values[i]) <=
              1e-9 * std::max(1.0, std::abs(sol.values[i])));
}
