#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <random>
#include <sstream>

#include "hsred/basis.hpp"
#include "hsred/couplings.hpp"
#include "hsred/eigensolver.hpp"
#include "hsred/hamiltonian.hpp"

using namespace hsred;

namespace {

// Independent route to the ladder matrix: Kronecker products of 2x2 spin
// operators over the full 2^(2L) product space, sector rows extracted at
// the end. No bit tricks shared with the library assembly.
DenseMatrix kron(const DenseMatrix &a, const DenseMatrix &b) {
    DenseMatrix k(a.rows * b.rows, a.cols * b.cols);
    for (std::size_t i = 0; i < a.rows; i++)
        for (std::size_t j = 0; j < a.cols; j++)
            for (std::size_t p = 0; p < b.rows; p++)
                for (std::size_t q = 0; q < b.cols; q++)
                    k(i * b.rows + p, j * b.cols + q) = a(i, j) * b(p, q);
    return k;
}

DenseMatrix identity(std::size_t n) {
    DenseMatrix id(n, n);
    for (std::size_t i = 0; i < n; i++) id(i, i) = 1.0;
    return id;
}

// site s of n sites, site 0 in the least significant tensor slot
DenseMatrix site_op(int n_sites, int s, const DenseMatrix &op) {
    DenseMatrix full = identity(1u << s);
    full = kron(op, full);
    return kron(identity(1u << (n_sites - 1 - s)), full);
}

DenseMatrix heisenberg_full(int n_sites, int a, int b, double j) {
    DenseMatrix sz(2, 2), sp(2, 2);
    sz(0, 0) = -0.5;
    sz(1, 1) = 0.5;
    sp(1, 0) = 1.0;
    const DenseMatrix sm = sp.transposed();
    DenseMatrix t = matmul(site_op(n_sites, a, sz), site_op(n_sites, b, sz));
    const DenseMatrix pm = matmul(site_op(n_sites, a, sp), site_op(n_sites, b, sm));
    const DenseMatrix mp = matmul(site_op(n_sites, a, sm), site_op(n_sites, b, sp));
    for (std::size_t i = 0; i < t.a.size(); i++)
        t.a[i] = j * (t.a[i] + 0.5 * (pm.a[i] + mp.a[i]));
    return t;
}

DenseMatrix ladder_oracle_full(int L, const CouplingSet &c) {
    const int n_sites = 2 * L;
    DenseMatrix h(1u << n_sites, 1u << n_sites);
    auto add = [&](const DenseMatrix &t) {
        for (std::size_t i = 0; i < h.a.size(); i++) h.a[i] += t.a[i];
    };
    auto site = [](int rung, int leg) { return 2 * rung + leg; };
    for (int i = 0; i < L; i++) add(heisenberg_full(n_sites, site(i, 0), site(i, 1), c.j_t));
    for (int i = 0; i + 1 < L; i++) {
        add(heisenberg_full(n_sites, site(i, 0), site(i + 1, 0), c.j_l));
        add(heisenberg_full(n_sites, site(i, 1), site(i + 1, 1), c.j_l));
        add(heisenberg_full(n_sites, site(i, 0), site(i + 1, 1), c.j_c));
        add(heisenberg_full(n_sites, site(i, 1), site(i + 1, 0), c.j_c));
    }
    return h;
}

DenseMatrix extract_sector(const DenseMatrix &full, int L, int m_tot) {
    std::vector<std::size_t> sector;
    for (std::size_t code = 0; code < full.rows; code++)
        if (std::popcount(code) == L + m_tot) sector.push_back(code);
    DenseMatrix s(sector.size(), sector.size());
    for (std::size_t i = 0; i < sector.size(); i++)
        for (std::size_t j = 0; j < sector.size(); j++) s(i, j) = full(sector[i], sector[j]);
    return s;
}

SplitHamiltonian tiny_split(std::vector<double> diag, double g) {
    SymCsr h0, h1;
    const std::size_t n = diag.size();
    h0.n = h1.n = n;
    h0.row_ptr.assign(n + 1, 0);
    h0.diag.assign(n, 0.0);
    h1.row_ptr.resize(n + 1);
    h1.diag = diag;
    for (std::size_t i = 0; i <= n; i++) h1.row_ptr[i] = i;
    for (std::size_t i = 0; i < n; i++) {
        h1.col.push_back(i);
        h1.val.push_back(diag[i]);
    }
    return SplitHamiltonian(std::move(h0), std::move(h1), g);
}

} // namespace

TEST_CASE("coupling ratios") {
    const CouplingSet c = CouplingSet::make(15.0, 5.0, 3.0);
    CHECK(c.gamma_tl == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(c.gamma_c == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(c.j1 == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(c.j2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(CouplingSet::make(0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CouplingSet::make(1.0, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("single rung spectrum") {
    const Basis b = build_su2_basis(1, 0);
    const auto h = assemble_su2(b, CouplingSet::make(1.0, 1.0, 1.0));
    const auto sol = dense_lowest(h.dense(), 2);
    CHECK(sol.values[0] == doctest::Approx(-0.75).epsilon(1e-14));
    CHECK(sol.values[1] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("su2 assembly matches the kronecker oracle") {
    for (const auto &c : {CouplingSet::make(1.0, 1.0, 1.0), CouplingSet::make(15.0, 5.0, 3.0)}) {
        for (int L : {2, 3}) {
            const DenseMatrix oracle = extract_sector(ladder_oracle_full(L, c), L, 0);
            const Basis b = build_su2_basis(L, 0);
            const DenseMatrix ours = assemble_su2(b, c).dense();
            REQUIRE(ours.rows == oracle.rows);
            for (std::size_t i = 0; i < ours.rows; i++)
                for (std::size_t j = 0; j < ours.cols; j++)
                    CHECK(std::abs(ours(i, j) - oracle(i, j)) < 1e-12);
        }
    }
}

TEST_CASE("sector traces add up to the full-space trace") {
    const CouplingSet c = CouplingSet::make(2.0, 1.0, 0.5);
    const DenseMatrix full = ladder_oracle_full(2, c);
    double full_trace = 0.0;
    for (std::size_t i = 0; i < full.rows; i++) full_trace += full(i, i);
    double sector_trace = 0.0;
    std::size_t total_dim = 0;
    for (int m = -2; m <= 2; m++) {
        const auto h = assemble_su2(build_su2_basis(2, m), c);
        for (double d : h.full_diagonal()) sector_trace += d;
        total_dim += h.dim();
    }
    CHECK(total_dim == 16);
    CHECK(sector_trace == doctest::Approx(full_trace).epsilon(1e-13));
}

TEST_CASE("rung operators") {
    const RungOperators ops = rung_operators();
    // basis order |00>, |1-1>, |10>, |11>
    CHECK(ops.sz(3, 3) == 1.0);  // Sz|11> = +|11>
    CHECK(ops.sz(0, 0) == 0.0);  // Sz|00> = 0
    CHECK(ops.rz(2, 0) == -1.0); // Rz|00> = -|10>

    // [Sz, S+] = S+
    const DenseMatrix comm_s = matmul(ops.sz, ops.sp);
    const DenseMatrix comm_s2 = matmul(ops.sp, ops.sz);
    for (std::size_t i = 0; i < 4; i++)
        for (std::size_t j = 0; j < 4; j++)
            CHECK(std::abs(comm_s(i, j) - comm_s2(i, j) - ops.sp(i, j)) < 1e-14);

    // S^2 = diag(0,2,2,2), R^2 = diag(3,1,1,1), S^2 + R^2 = 3
    auto casimir = [](const DenseMatrix &p, const DenseMatrix &m, const DenseMatrix &z) {
        DenseMatrix c = matmul(z, z);
        const DenseMatrix pm = matmul(p, m), mp = matmul(m, p);
        for (std::size_t i = 0; i < c.a.size(); i++) c.a[i] += 0.5 * (pm.a[i] + mp.a[i]);
        return c;
    };
    const DenseMatrix s2 = casimir(ops.sp, ops.sm, ops.sz);
    const DenseMatrix r2 = casimir(ops.rp, ops.rm, ops.rz);
    const double s2_diag[4] = {0.0, 2.0, 2.0, 2.0};
    const double r2_diag[4] = {3.0, 1.0, 1.0, 1.0};
    for (std::size_t i = 0; i < 4; i++)
        for (std::size_t j = 0; j < 4; j++) {
            CHECK(std::abs(s2(i, j) - (i == j ? s2_diag[i] : 0.0)) < 1e-14);
            CHECK(std::abs(r2(i, j) - (i == j ? r2_diag[i] : 0.0)) < 1e-14);
        }
}

TEST_CASE("so4 single rung diagonal") {
    const Basis b = build_so4_basis(1, 0);
    const auto h = assemble_so4(b, CouplingSet::make(1.0, 1.0, 1.0));
    const DenseMatrix d = h.dense();
    CHECK(d(0, 0) == doctest::Approx(-0.75).epsilon(1e-15)); // singlet
    CHECK(d(1, 1) == doctest::Approx(0.25).epsilon(1e-15));  // triplet
    CHECK(d(0, 1) == 0.0);
}

TEST_CASE("scheme mismatch rejected") {
    const CouplingSet c = CouplingSet::make(1.0, 1.0, 1.0);
    CHECK_THROWS_AS(assemble_su2(build_so4_basis(2, 0), c), std::invalid_argument);
    CHECK_THROWS_AS(assemble_so4(build_su2_basis(2, 0), c), std::invalid_argument);
}

TEST_CASE("scheme equivalence for small ladders") {
    const CouplingSet c = CouplingSet::make(15.0, 5.0, 3.0);
    for (int L : {2, 3, 4}) {
        const auto su2 = dense_lowest(assemble_su2(build_su2_basis(L, 0), c).dense(), 4);
        const auto so4 = dense_lowest(assemble_so4(build_so4_basis(L, 0), c).dense(), 4);
        for (int i = 0; i < 4; i++) {
            const double denom = std::max(std::abs(su2.values[i]), std::abs(so4.values[i]));
            CHECK(std::abs(su2.values[i] - so4.values[i]) <= 1e-9 * denom);
        }
    }
}

TEST_CASE("matvec") {
    const CouplingSet c = CouplingSet::make(1.7, 0.9, 0.4);
    const auto h = assemble_su2(build_su2_basis(2, 0), c);

    const std::vector<double> zero(h.dim(), 0.0);
    CHECK(h.apply(zero) == zero);

    // dense multiply comparison on random input
    const DenseMatrix d = h.dense();
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(h.dim());
    for (double &v : x) v = u(gen);
    const auto y = h.apply(x);
    for (std::size_t i = 0; i < h.dim(); i++) {
        double yi = 0.0;
        for (std::size_t j = 0; j < h.dim(); j++) yi += d(i, j) * x[j];
        CHECK(std::abs(y[i] - yi) < 1e-12);
    }

    CHECK_THROWS_AS(h.apply(std::vector<double>(3, 0.0)), std::invalid_argument);
}

TEST_CASE("matvec on an identity fragment") {
    const auto h = tiny_split({1.0, 1.0}, 2.0);
    std::vector<double> e1{1.0, 0.0};
    CHECK(h.apply(e1) == std::vector<double>{2.0, 0.0});
}

TEST_CASE("symmetry of assembled matrices") {
    const CouplingSet c = CouplingSet::make(2.5, 5.0, 3.0);
    for (Scheme scheme : {Scheme::SU2, Scheme::SO4}) {
        const Basis b = scheme == Scheme::SU2 ? build_su2_basis(3, 0) : build_so4_basis(3, 0);
        const auto h = assemble(b, c);
        const DenseMatrix d = h.dense();
        for (std::size_t i = 0; i < d.rows; i++)
            for (std::size_t j = i + 1; j < d.cols; j++) CHECK(d(i, j) == d(j, i)); // exact

        std::mt19937_64 gen(11);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<double> x(h.dim()), y(h.dim());
        for (double &v : x) v = u(gen);
        for (double &v : y) v = u(gen);
        const auto hx = h.apply(x), hy = h.apply(y);
        double xhy = 0.0, yhx = 0.0;
        for (std::size_t i = 0; i < h.dim(); i++) {
            xhy += x[i] * hy[i];
            yhx += y[i] * hx[i];
        }
        CHECK(std::abs(xhy - yhx) < 1e-12 * std::max(1.0, std::abs(xhy)));
    }
}

TEST_CASE("row nonzero count stays within the bond bound") {
    const CouplingSet c = CouplingSet::make(15.0, 5.0, 3.0);
    const int L = 4;
    const auto h = assemble_su2(build_su2_basis(L, 0), c);
    const std::size_t bonds = L + 4 * (L - 1);
    for (std::size_t i = 0; i < h.dim(); i++)
        CHECK(h.couplings_below(i, h.dim()).idx.size() <= 1 + bonds);
}

TEST_CASE("restrict") {
    const CouplingSet c = CouplingSet::make(1.0, 0.8, 0.6);
    const auto h = assemble_su2(build_su2_basis(2, 0), c);
    const DenseMatrix d = h.dense();

    std::vector<std::size_t> all(h.dim());
    for (std::size_t i = 0; i < h.dim(); i++) all[i] = i;
    const auto same = h.restricted(all);
    const DenseMatrix ds = same.dense();
    for (std::size_t i = 0; i < d.a.size(); i++) CHECK(ds.a[i] == d.a[i]);

    const std::vector<std::size_t> first{0};
    const auto one = h.restricted(first);
    CHECK(one.dim() == 1);
    CHECK(one.dense()(0, 0) == d(0, 0));

    const auto drop_last = h.restricted_prefix(h.dim() - 1);
    const DenseMatrix dl = drop_last.dense();
    for (std::size_t i = 0; i + 1 < h.dim(); i++)
        for (std::size_t j = 0; j + 1 < h.dim(); j++) CHECK(dl(i, j) == d(i, j));

    const std::vector<std::size_t> scattered{0, 2, 3, 5};
    const auto sub = h.restricted(scattered);
    const DenseMatrix dsub = sub.dense();
    for (std::size_t i = 0; i < scattered.size(); i++)
        for (std::size_t j = 0; j < scattered.size(); j++)
            CHECK(dsub(i, j) == d(scattered[i], scattered[j]));

    const auto wo = h.restricted_without(2);
    const std::vector<std::size_t> keep{0, 1, 3, 4, 5};
    const DenseMatrix dwo = wo.dense();
    for (std::size_t i = 0; i < keep.size(); i++)
        for (std::size_t j = 0; j < keep.size(); j++)
            CHECK(dwo(i, j) == d(keep[i], keep[j]));

    CHECK_THROWS_AS(h.restricted(std::vector<std::size_t>{}), std::invalid_argument);
    CHECK_THROWS_AS(h.restricted(std::vector<std::size_t>{1, 1}), std::invalid_argument);
}

TEST_CASE("coordinate dump format") {
    const auto h = tiny_split({0.5, -1.0}, 3.0);
    std::ostringstream os;
    h.write_coordinate_format(os);
    CHECK(os.str() == "1 1 1.5\n2 2 -3\n");
}
