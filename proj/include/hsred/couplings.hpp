#pragma once

#include <stdexcept>

namespace hsred {

/// Ladder exchange couplings. j_t acts across rungs, j_l along legs,
/// j_c on the frustrating diagonals (the two diagonal bonds carry the
/// same strength). The reduced ratios gamma_tl, gamma_c are frozen into
/// the interaction matrix so that the single running coupling g = j_t
/// rescales all three bonds proportionally; j1, j2 are the leg/diagonal
/// combinations used by the rung singlet-triplet representation.
struct CouplingSet {
    double j_t;
    double j_l;
    double j_c;
    double gamma_tl; // j_l / j_t
    double gamma_c;  // j_c / j_t
    double j1;       // (j_l + j_c) / 2
    double j2;       // (j_l - j_c) / 2

    static CouplingSet make(double j_t, double j_l, double j_c) {
        if (!(j_t > 0.0) || !(j_l > 0.0) || !(j_c > 0.0))
            throw std::invalid_argument("CouplingSet: all couplings must be positive");
        CouplingSet c;
        c.j_t = j_t;
        c.j_l = j_l;
        c.j_c = j_c;
        c.gamma_tl = j_l / j_t;
        c.gamma_c = j_c / j_t;
        c.j1 = 0.5 * (j_l + j_c);
        c.j2 = 0.5 * (j_l - j_c);
        return c;
    }
};

} // namespace hsred
