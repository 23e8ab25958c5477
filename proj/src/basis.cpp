#include "hsred/basis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace hsred {

namespace {

void check_sector(int L, int m_tot) {
    if (L < 1 || L > kMaxLegSites) throw std::invalid_argument("basis: L out of range");
    if (m_tot < -L || m_tot > L)
        throw std::invalid_argument("basis: empty sector, |M_tot| exceeds L");
}

} // namespace

int so4_label_m(std::uint32_t label) {
    static constexpr int m_of[4] = {0, -1, 0, +1};
    return m_of[label & 3u];
}

int su2_code_m(std::uint32_t code, int L) {
    // sum of m_i = popcount - (2L - popcount) halves
    return std::popcount(code) - L;
}

Basis build_su2_basis(int L, int m_tot) {
    check_sector(L, m_tot);
    Basis b;
    b.scheme = Scheme::SU2;
    b.L = L;
    b.m_tot = m_tot;
    const int sites = 2 * L;
    const int ones = L + m_tot;
    // ascending integer value of the bit code is the canonical order
    for (std::uint32_t code = 0; code < (1u << sites); code++)
        if (std::popcount(code) == ones) b.states.push_back(code);
    return b;
}

Basis build_so4_basis(int L, int m_tot) {
    check_sector(L, m_tot);
    Basis b;
    b.scheme = Scheme::SO4;
    b.L = L;
    b.m_tot = m_tot;
    // odometer over label sequences, most significant rung first, so the
    // emitted order is lexicographic with (0,0) < (1,-1) < (1,0) < (1,+1)
    std::vector<std::uint32_t> labels(L, 0);
    for (;;) {
        int m = 0;
        for (int r = 0; r < L; r++) m += so4_label_m(labels[r]);
        if (m == m_tot) {
            std::uint32_t code = 0;
            for (int r = 0; r < L; r++) code |= labels[r] << (2 * r);
            b.states.push_back(code);
        }
        int pos = L - 1;
        while (pos >= 0 && labels[pos] == 3) labels[pos--] = 0;
        if (pos < 0) break;
        labels[pos]++;
    }
    return b;
}

std::vector<std::size_t> sort_permutation(std::span<const double> diag) {
    std::vector<std::size_t> perm(diag.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });
    return perm;
}

Basis order_by_diagonal(const Basis &basis, std::span<const double> diag) {
    if (diag.size() != basis.states.size())
        throw std::invalid_argument("order_by_diagonal: diagonal length mismatch");
    const auto perm = sort_permutation(diag);
    Basis out;
    out.scheme = basis.scheme;
    out.L = basis.L;
    out.m_tot = basis.m_tot;
    out.states.reserve(perm.size());
    out.diagonal.reserve(perm.size());
    for (std::size_t k : perm) {
        out.states.push_back(basis.states[k]);
        out.diagonal.push_back(diag[k]);
    }
    return out;
}

DenseMatrix rung_transform(int L, int m_tot) {
    const Basis su2 = build_su2_basis(L, m_tot);
    const Basis so4 = build_so4_basis(L, m_tot);
    // per-rung overlaps <S M | m1 m2>, su2 rung value = bit pair (m1, m2)
    // packed as m1 + 2*m2, singlet (|ud> - |du>)/sqrt(2)
    const double rt = 1.0 / std::sqrt(2.0);
    double ov[4][4] = {}; // [label][pair]
    ov[3][3] = 1.0;       // |11>   = uu
    ov[1][0] = 1.0;       // |1-1>  = dd
    ov[2][1] = rt;        // |10>   = (ud + du)/sqrt2  (pair 1 = up on leg 1)
    ov[2][2] = rt;
    ov[0][1] = rt; // |00>  = (ud - du)/sqrt2
    ov[0][2] = -rt;

    DenseMatrix u(so4.size(), su2.size());
    for (std::size_t r = 0; r < so4.size(); r++) {
        for (std::size_t c = 0; c < su2.size(); c++) {
            double prod = 1.0;
            for (int i = 0; i < L && prod != 0.0; i++) {
                const std::uint32_t label = (so4.states[r] >> (2 * i)) & 3u;
                const std::uint32_t pair = (su2.states[c] >> (2 * i)) & 3u;
                prod *= ov[label][pair];
            }
            u(r, c) = prod;
        }
    }
    return u;
}

std::string state_label(const Basis &basis, std::size_t i) {
    const std::uint32_t code = basis.states.at(i);
    std::string s;
    if (basis.scheme == Scheme::SU2) {
        for (int site = 0; site < 2 * basis.L; site++)
            s += ((code >> site) & 1u) ? "↑" : "↓";
    } else {
        static const char *tok[4] = {"s", "t-", "t0", "t+"};
        for (int r = 0; r < basis.L; r++) {
            if (r) s += '.';
            s += tok[(code >> (2 * r)) & 3u];
        }
    }
    return s;
}

void write_basis_csv(const Basis &basis, std::ostream &os) {
    os << "index,label,eps\n";
    char buf[40];
    for (std::size_t i = 0; i < basis.size(); i++) {
        os << i + 1 << ',' << state_label(basis, i) << ',';
        if (i < basis.diagonal.size()) {
            std::snprintf(buf, sizeof(buf), "%.17g", basis.diagonal[i]);
            os << buf;
        }
        os << '\n';
    }
}

} // namespace hsred
