#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hsred/types.hpp"

namespace hsred {

// State encodings (one 32-bit code per many-spin configuration):
//
// SU(2): bit i set <=> m_i = +1/2 on the i-th of 2L sites, sites ordered
// as (leg-1, leg-2) pairs rung by rung, i.e. bit 2r is leg 1 of rung r
// and bit 2r+1 is leg 2 of rung r (r = 0..L-1).
//
// SO(4): two bits per rung, label values 0 = |00>, 1 = |1,-1>, 2 = |1,0>,
// 3 = |1,+1>, rung 0 in the least significant pair. Lexicographic order
// of the label sequence (rung 0 most significant) is the canonical order.

constexpr int kMaxLegSites = 14; // 2L <= 28 bits per code

/// Basis of the fixed-magnetization sector, states in a deterministic
/// canonical order until order_by_diagonal replaces it with the
/// ascending-diagonal order used by the reduction loop. `diagonal`
/// stays empty until then.
struct Basis {
    Scheme scheme = Scheme::SU2;
    int L = 0;
    int m_tot = 0;
    std::vector<std::uint32_t> states;
    std::vector<double> diagonal;

    std::size_t size() const { return states.size(); }
};

Basis build_su2_basis(int L, int m_tot);
Basis build_so4_basis(int L, int m_tot);

/// Stable ascending sort permutation: perm[k] = index of the state with
/// the k-th smallest diagonal element, ties kept in input order.
std::vector<std::size_t> sort_permutation(std::span<const double> diag);

/// Re-orders the basis by ascending diagonal element and stores the
/// sorted diagonal. The reduction loop always eliminates the last state.
Basis order_by_diagonal(const Basis &basis, std::span<const double> diag);

/// Orthogonal change of basis between the SU(2) and SO(4) canonical
/// bases of the same sector: entry (r, c) = <so4 state r | su2 state c>.
/// Cross-validation only; the per-rung zero-M block uses the singlet
/// convention (|ud> - |du>)/sqrt(2).
DenseMatrix rung_transform(int L, int m_tot = 0);

/// Labels: SU(2) arrows per site ("ud...", rendered as UTF-8 arrows);
/// SO(4) per-rung tokens s, t-, t0, t+ joined by '.'.
std::string state_label(const Basis &basis, std::size_t i);

/// Debug dump, one "index,label,eps" line per state; the epsilon field
/// is left blank while `diagonal` is unfilled.
void write_basis_csv(const Basis &basis, std::ostream &os);

int so4_label_m(std::uint32_t label);     // M of a single rung label 0..3
int su2_code_m(std::uint32_t code, int L); // total magnetization of a bit code

} // namespace hsred
