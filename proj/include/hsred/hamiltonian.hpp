#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "hsred/basis.hpp"
#include "hsred/couplings.hpp"
#include "hsred/types.hpp"

namespace hsred {

/// Compressed sparse rows of a real symmetric matrix. Both triangles and
/// the diagonal are stored explicitly (row slice == column slice), with
/// column indices ascending inside each row so a prefix restriction can
/// stop scanning a row at the first out-of-range column.
struct SymCsr {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr; // n + 1
    std::vector<std::size_t> col;
    std::vector<double> val;
    std::vector<double> diag; // n, duplicated from the stored entries

    std::size_t nnz() const { return col.size(); }
};

struct RungOperators {
    DenseMatrix sp, sm, sz; // rung total spin,   basis {|00>,|1-1>,|10>,|11>}
    DenseMatrix rp, rm, rz; // rung spin difference, same basis
};

/// The generator matrices of the rung singlet-triplet representation.
RungOperators rung_operators();

/// H(g) = H0 + g * H1 on a fixed basis. H0 is identically zero for the
/// ladder assemblies but the pair is kept so the renormalization step
/// handles a general split. Value semantics; the assembled storage is
/// immutable and shared, so prefix restrictions are O(1).
class SplitHamiltonian {
  public:
    SplitHamiltonian() = default;
    SplitHamiltonian(SymCsr h0, SymCsr h1, double g);

    std::size_t dim() const { return dim_; }
    double g() const { return g_; }
    void set_g(double g) { g_ = g; }

    /// y = (H0 + g H1) x. Deterministic: rows in order, columns ascending.
    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> apply(std::span<const double> x) const;

    /// Same for a single component: y = (H0 + g H1)|restricted x, used by
    /// the renormalization step on the kept block.
    void apply_h0(std::span<const double> x, std::span<double> y) const;
    void apply_h1(std::span<const double> x, std::span<double> y) const;

    double h0_diag(std::size_t i) const;
    double h1_diag(std::size_t i) const;
    std::vector<double> full_diagonal() const; // diag of H(g)
    bool h0_is_zero() const;                   // no stored H0 entries

    /// Couplings of state `i` to all states j < limit, as parallel arrays
    /// (j, h0_ij, h1_ij). Cheap row slice by symmetry.
    struct RowSlice {
        std::vector<std::size_t> idx;
        std::vector<double> h0;
        std::vector<double> h1;
    };
    RowSlice couplings_below(std::size_t i, std::size_t limit) const;

    /// Principal submatrix pair on `keep` (indices ascending, non-empty);
    /// g is unchanged. A prefix keep set shares the assembled storage.
    SplitHamiltonian restricted(std::span<const std::size_t> keep) const;
    SplitHamiltonian restricted_prefix(std::size_t m) const;
    /// Drop one state, keeping everything else in order.
    SplitHamiltonian restricted_without(std::size_t drop) const;

    DenseMatrix dense() const;    // H0 + g H1 on the active block
    DenseMatrix dense_h0() const;
    DenseMatrix dense_h1() const;

    /// Coordinate-format dump "i j value" (1-based, 17 significant digits)
    /// of the active block of H0 + g H1.
    void write_coordinate_format(std::ostream &os) const;

  private:
    std::shared_ptr<const std::pair<SymCsr, SymCsr>> storage_;
    std::size_t dim_ = 0;
    double g_ = 0.0;

    void check_vec(std::size_t len) const;
};

SplitHamiltonian assemble_su2(const Basis &basis, const CouplingSet &couplings);
SplitHamiltonian assemble_so4(const Basis &basis, const CouplingSet &couplings);
SplitHamiltonian assemble(const Basis &basis, const CouplingSet &couplings);

} // namespace hsred
