#include "hsred/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace hsred {

namespace {

// Accumulates entries row by row; duplicate coordinates coalesce in the
// per-row map so the assembled CSR is deterministic.
class CsrBuilder {
  public:
    explicit CsrBuilder(std::size_t n) : rows_(n) {}

    void add(std::size_t i, std::size_t j, double v) {
        if (v == 0.0) return;
        rows_[i][j] += v;
    }

    SymCsr finish() && {
        SymCsr m;
        m.n = rows_.size();
        m.row_ptr.assign(m.n + 1, 0);
        m.diag.assign(m.n, 0.0);
        std::size_t nnz = 0;
        for (const auto &row : rows_) nnz += row.size();
        m.col.reserve(nnz);
        m.val.reserve(nnz);
        for (std::size_t i = 0; i < m.n; i++) {
            for (const auto &[j, v] : rows_[i]) {
                m.col.push_back(j);
                m.val.push_back(v);
                if (j == i) m.diag[i] = v;
            }
            m.row_ptr[i + 1] = m.col.size();
        }
        return m;
    }

  private:
    std::vector<std::map<std::size_t, double>> rows_;
};

SymCsr zero_matrix(std::size_t n) {
    SymCsr m;
    m.n = n;
    m.row_ptr.assign(n + 1, 0);
    m.diag.assign(n, 0.0);
    return m;
}

// state code -> basis index lookup for an arbitrarily ordered basis
class StateIndex {
  public:
    explicit StateIndex(const std::vector<std::uint32_t> &states) {
        entries_.reserve(states.size());
        for (std::size_t i = 0; i < states.size(); i++) entries_.push_back({states[i], i});
        std::sort(entries_.begin(), entries_.end());
    }

    std::size_t at(std::uint32_t code) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(),
                                   std::pair<std::uint32_t, std::size_t>{code, 0});
        if (it == entries_.end() || it->first != code)
            throw std::logic_error("assembly: generated state outside the sector basis");
        return it->second;
    }

  private:
    std::vector<std::pair<std::uint32_t, std::size_t>> entries_;
};

struct Bond {
    int site_a; // 0-based site indices into the 2L-site chain
    int site_b;
    double weight; // gamma factor carried by H1
};

// rung, leg and diagonal bonds of the two-leg ladder, open ends
std::vector<Bond> su2_bonds(int L, const CouplingSet &c) {
    std::vector<Bond> bonds;
    auto site = [](int rung, int leg) { return 2 * rung + leg; };
    for (int i = 0; i < L; i++) bonds.push_back({site(i, 0), site(i, 1), 1.0});
    for (int i = 0; i + 1 < L; i++) {
        bonds.push_back({site(i, 0), site(i + 1, 0), c.gamma_tl});
        bonds.push_back({site(i, 1), site(i + 1, 1), c.gamma_tl});
        bonds.push_back({site(i, 0), site(i + 1, 1), c.gamma_c});
        bonds.push_back({site(i, 1), site(i + 1, 0), c.gamma_c});
    }
    return bonds;
}

} // namespace

RungOperators rung_operators() {
    const double rt2 = std::sqrt(2.0);
    RungOperators ops;
    ops.sp = DenseMatrix(4, 4);
    ops.sz = DenseMatrix(4, 4);
    ops.rp = DenseMatrix(4, 4);
    ops.rz = DenseMatrix(4, 4);
    // basis order |00>, |1-1>, |10>, |11>
    ops.sp(3, 2) = rt2; // S+|10>  =  sqrt2 |11>
    ops.sp(2, 1) = rt2; // S+|1-1> =  sqrt2 |10>
    ops.sz(1, 1) = -1.0;
    ops.sz(3, 3) = 1.0;
    ops.rp(3, 0) = rt2;  // R+|00>  =  sqrt2 |11>
    ops.rp(0, 1) = -rt2; // R+|1-1> = -sqrt2 |00>
    ops.rz(2, 0) = -1.0; // Rz|00>  = -|10>
    ops.rz(0, 2) = -1.0; // Rz|10>  = -|00>
    ops.sm = ops.sp.transposed();
    ops.rm = ops.rp.transposed();
    return ops;
}

SplitHamiltonian::SplitHamiltonian(SymCsr h0, SymCsr h1, double g)
    : storage_(std::make_shared<std::pair<SymCsr, SymCsr>>(std::move(h0), std::move(h1))),
      dim_(storage_->second.n), g_(g) {
    if (storage_->first.n != storage_->second.n)
        throw std::invalid_argument("SplitHamiltonian: H0/H1 dimension mismatch");
}

void SplitHamiltonian::check_vec(std::size_t len) const {
    if (len != dim_) throw std::invalid_argument("SplitHamiltonian: vector length mismatch");
}

namespace {

// y += scale * M|prefix * x, column scan stops at the first col >= dim
void apply_csr(const SymCsr &m, double scale, std::span<const double> x, std::span<double> y,
               std::size_t dim) {
    if (scale == 0.0 || m.col.empty()) return;
    for (std::size_t i = 0; i < dim; i++) {
        double acc = 0.0;
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; k++) {
            const std::size_t j = m.col[k];
            if (j >= dim) break;
            acc += m.val[k] * x[j];
        }
        y[i] += scale * acc;
    }
}

} // namespace

void SplitHamiltonian::apply(std::span<const double> x, std::span<double> y) const {
    check_vec(x.size());
    check_vec(y.size());
    std::fill(y.begin(), y.end(), 0.0);
    apply_csr(storage_->first, 1.0, x, y, dim_);
    apply_csr(storage_->second, g_, x, y, dim_);
}

std::vector<double> SplitHamiltonian::apply(std::span<const double> x) const {
    std::vector<double> y(dim_, 0.0);
    apply(x, y);
    return y;
}

void SplitHamiltonian::apply_h0(std::span<const double> x, std::span<double> y) const {
    check_vec(x.size());
    check_vec(y.size());
    std::fill(y.begin(), y.end(), 0.0);
    apply_csr(storage_->first, 1.0, x, y, dim_);
}

void SplitHamiltonian::apply_h1(std::span<const double> x, std::span<double> y) const {
    check_vec(x.size());
    check_vec(y.size());
    std::fill(y.begin(), y.end(), 0.0);
    apply_csr(storage_->second, 1.0, x, y, dim_);
}

double SplitHamiltonian::h0_diag(std::size_t i) const { return storage_->first.diag.at(i); }
double SplitHamiltonian::h1_diag(std::size_t i) const { return storage_->second.diag.at(i); }

bool SplitHamiltonian::h0_is_zero() const { return storage_->first.col.empty(); }

std::vector<double> SplitHamiltonian::full_diagonal() const {
    std::vector<double> d(dim_);
    for (std::size_t i = 0; i < dim_; i++)
        d[i] = storage_->first.diag[i] + g_ * storage_->second.diag[i];
    return d;
}

SplitHamiltonian::RowSlice SplitHamiltonian::couplings_below(std::size_t i,
                                                             std::size_t limit) const {
    if (i >= dim_ || limit > dim_)
        throw std::invalid_argument("couplings_below: index out of range");
    RowSlice slice;
    const SymCsr &h0 = storage_->first;
    const SymCsr &h1 = storage_->second;
    // merge the two row patterns; both column lists are ascending
    std::size_t k0 = h0.row_ptr[i], e0 = h0.row_ptr[i + 1];
    std::size_t k1 = h1.row_ptr[i], e1 = h1.row_ptr[i + 1];
    while (k0 < e0 || k1 < e1) {
        const std::size_t c0 = k0 < e0 ? h0.col[k0] : SIZE_MAX;
        const std::size_t c1 = k1 < e1 ? h1.col[k1] : SIZE_MAX;
        const std::size_t j = std::min(c0, c1);
        if (j >= limit) break;
        slice.idx.push_back(j);
        slice.h0.push_back(c0 == j ? h0.val[k0++] : 0.0);
        slice.h1.push_back(c1 == j ? h1.val[k1++] : 0.0);
    }
    return slice;
}

namespace {

SymCsr restrict_csr(const SymCsr &m, std::span<const std::size_t> keep) {
    std::vector<std::size_t> remap(m.n, SIZE_MAX);
    for (std::size_t k = 0; k < keep.size(); k++) remap[keep[k]] = k;
    SymCsr out;
    out.n = keep.size();
    out.row_ptr.assign(out.n + 1, 0);
    out.diag.assign(out.n, 0.0);
    for (std::size_t k = 0; k < keep.size(); k++) {
        const std::size_t i = keep[k];
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; p++) {
            const std::size_t j = remap[m.col[p]];
            if (j == SIZE_MAX) continue;
            out.col.push_back(j);
            out.val.push_back(m.val[p]);
            if (j == k) out.diag[k] = m.val[p];
        }
        out.row_ptr[k + 1] = out.col.size();
    }
    return out;
}

} // namespace

SplitHamiltonian SplitHamiltonian::restricted(std::span<const std::size_t> keep) const {
    if (keep.empty()) throw std::invalid_argument("restricted: empty keep set");
    for (std::size_t k = 0; k < keep.size(); k++) {
        if (keep[k] >= dim_) throw std::invalid_argument("restricted: index out of range");
        if (k && keep[k] <= keep[k - 1])
            throw std::invalid_argument("restricted: keep set must be strictly ascending");
    }
    if (keep.back() == keep.size() - 1) return restricted_prefix(keep.size());
    SplitHamiltonian out;
    out.storage_ = std::make_shared<std::pair<SymCsr, SymCsr>>(
        restrict_csr(storage_->first, keep), restrict_csr(storage_->second, keep));
    out.dim_ = keep.size();
    out.g_ = g_;
    return out;
}

SplitHamiltonian SplitHamiltonian::restricted_prefix(std::size_t m) const {
    if (m == 0 || m > dim_) throw std::invalid_argument("restricted_prefix: bad dimension");
    SplitHamiltonian out(*this);
    out.dim_ = m;
    return out;
}

SplitHamiltonian SplitHamiltonian::restricted_without(std::size_t drop) const {
    if (drop >= dim_) throw std::invalid_argument("restricted_without: index out of range");
    if (drop == dim_ - 1) return restricted_prefix(dim_ - 1);
    std::vector<std::size_t> keep;
    keep.reserve(dim_ - 1);
    for (std::size_t i = 0; i < dim_; i++)
        if (i != drop) keep.push_back(i);
    return restricted(keep);
}

namespace {

DenseMatrix csr_to_dense(const SymCsr &m, std::size_t dim, double scale, DenseMatrix *into) {
    DenseMatrix d = into ? std::move(*into) : DenseMatrix(dim, dim);
    for (std::size_t i = 0; i < dim; i++)
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; k++) {
            const std::size_t j = m.col[k];
            if (j >= dim) break;
            d(i, j) += scale * m.val[k];
        }
    return d;
}

} // namespace

DenseMatrix SplitHamiltonian::dense() const {
    DenseMatrix d = csr_to_dense(storage_->first, dim_, 1.0, nullptr);
    return csr_to_dense(storage_->second, dim_, g_, &d);
}

DenseMatrix SplitHamiltonian::dense_h0() const {
    return csr_to_dense(storage_->first, dim_, 1.0, nullptr);
}

DenseMatrix SplitHamiltonian::dense_h1() const {
    return csr_to_dense(storage_->second, dim_, 1.0, nullptr);
}

void SplitHamiltonian::write_coordinate_format(std::ostream &os) const {
    char buf[40];
    const SymCsr &h0 = storage_->first;
    const SymCsr &h1 = storage_->second;
    for (std::size_t i = 0; i < dim_; i++) {
        std::size_t k0 = h0.row_ptr[i], e0 = h0.row_ptr[i + 1];
        std::size_t k1 = h1.row_ptr[i], e1 = h1.row_ptr[i + 1];
        while (k0 < e0 || k1 < e1) {
            const std::size_t c0 = k0 < e0 ? h0.col[k0] : SIZE_MAX;
            const std::size_t c1 = k1 < e1 ? h1.col[k1] : SIZE_MAX;
            const std::size_t j = std::min(c0, c1);
            if (j >= dim_) break;
            double v = 0.0;
            if (c0 == j) v += h0.val[k0++];
            if (c1 == j) v += g_ * h1.val[k1++];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            os << i + 1 << ' ' << j + 1 << ' ' << buf << '\n';
        }
    }
}

SplitHamiltonian assemble_su2(const Basis &basis, const CouplingSet &couplings) {
    if (basis.scheme != Scheme::SU2)
        throw std::invalid_argument("assemble_su2: basis scheme mismatch");
    const std::size_t n = basis.size();
    const StateIndex index(basis.states);
    const auto bonds = su2_bonds(basis.L, couplings);
    CsrBuilder h1(n);
    // s_i . s_j = sz_i sz_j + (s+_i s-_j + s-_i s+_j) / 2
    for (std::size_t s = 0; s < n; s++) {
        const std::uint32_t code = basis.states[s];
        double diag = 0.0;
        for (const Bond &b : bonds) {
            const int ba = (code >> b.site_a) & 1, bb = (code >> b.site_b) & 1;
            diag += b.weight * (ba == bb ? 0.25 : -0.25);
            if (ba != bb) {
                const std::uint32_t flipped =
                    code ^ ((1u << b.site_a) | (1u << b.site_b));
                h1.add(index.at(flipped), s, 0.5 * b.weight);
            }
        }
        h1.add(s, s, diag);
    }
    return SplitHamiltonian(zero_matrix(n), std::move(h1).finish(), couplings.j_t);
}

SplitHamiltonian assemble_so4(const Basis &basis, const CouplingSet &couplings) {
    if (basis.scheme != Scheme::SO4)
        throw std::invalid_argument("assemble_so4: basis scheme mismatch");
    const std::size_t n = basis.size();
    const StateIndex index(basis.states);
    const RungOperators ops = rung_operators();

    // two-site bond matrices S_i.S_j and R_i.R_j on the 16-dim rung pair,
    // index a + 4*b for (label_a at rung i, label_b at rung j)
    auto dot16 = [](const DenseMatrix &p, const DenseMatrix &m, const DenseMatrix &z) {
        DenseMatrix d(16, 16);
        for (int ai = 0; ai < 4; ai++)
            for (int aj = 0; aj < 4; aj++)
                for (int bi = 0; bi < 4; bi++)
                    for (int bj = 0; bj < 4; bj++)
                        d(ai + 4 * aj, bi + 4 * bj) =
                            z(ai, bi) * z(aj, bj) +
                            0.5 * (p(ai, bi) * m(aj, bj) + m(ai, bi) * p(aj, bj));
        return d;
    };
    const DenseMatrix bond_s = dot16(ops.sp, ops.sm, ops.sz);
    const DenseMatrix bond_r = dot16(ops.rp, ops.rm, ops.rz);
    const double ws = couplings.j1 / couplings.j_t; // (gamma_tl + gamma_c) / 2
    const double wr = couplings.j2 / couplings.j_t; // (gamma_tl - gamma_c) / 2

    // rung term (S^2 - R^2)/4: -3/4 on a singlet, +1/4 on a triplet
    static constexpr double rung_diag[4] = {-0.75, 0.25, 0.25, 0.25};

    CsrBuilder h1(n);
    for (std::size_t s = 0; s < n; s++) {
        const std::uint32_t code = basis.states[s];
        double diag = 0.0;
        for (int r = 0; r < basis.L; r++) diag += rung_diag[(code >> (2 * r)) & 3u];
        h1.add(s, s, diag);
        for (int r = 0; r + 1 < basis.L; r++) {
            const std::uint32_t la = (code >> (2 * r)) & 3u;
            const std::uint32_t lb = (code >> (2 * (r + 1))) & 3u;
            const std::size_t in16 = la + 4 * lb;
            for (std::size_t out16 = 0; out16 < 16; out16++) {
                const double vs = bond_s(out16, in16);
                const double vr = bond_r(out16, in16);
                const double v = ws * vs + wr * vr;
                if (v == 0.0) continue;
                const std::uint32_t oa = out16 & 3u, ob = (out16 >> 2) & 3u;
                std::uint32_t target = code & ~((3u << (2 * r)) | (3u << (2 * (r + 1))));
                target |= (oa << (2 * r)) | (ob << (2 * (r + 1)));
                h1.add(index.at(target), s, v);
            }
        }
    }
    return SplitHamiltonian(zero_matrix(n), std::move(h1).finish(), couplings.j_t);
}

SplitHamiltonian assemble(const Basis &basis, const CouplingSet &couplings) {
    return basis.scheme == Scheme::SU2 ? assemble_su2(basis, couplings)
                                       : assemble_so4(basis, couplings);
}

} // namespace hsred
