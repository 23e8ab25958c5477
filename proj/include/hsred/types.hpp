#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hsred {

enum class Scheme { SU2, SO4 };

/// Small dense real matrix, row-major. Used for rung operators, the
/// rung change-of-basis matrix and as exchange format for the dense
/// eigensolver path.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double &operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    DenseMatrix transposed() const {
        DenseMatrix t(cols, rows);
        for (std::size_t i = 0; i < rows; i++)
            for (std::size_t j = 0; j < cols; j++) t(j, i) = (*this)(i, j);
        return t;
    }
};

inline DenseMatrix matmul(const DenseMatrix &x, const DenseMatrix &y) {
    if (x.cols != y.rows) throw std::invalid_argument("matmul: dimension mismatch");
    DenseMatrix z(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; i++)
        for (std::size_t k = 0; k < x.cols; k++) {
            const double v = x(i, k);
            if (v == 0.0) continue;
            for (std::size_t j = 0; j < y.cols; j++) z(i, j) += v * y(k, j);
        }
    return z;
}

} // namespace hsred
