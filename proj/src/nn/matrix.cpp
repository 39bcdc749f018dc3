#include "sizer/nn/matrix.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "sizer/nn/kernels.hpp"
#include "sizer/util/error.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace sizer::nn {

namespace {

#if defined(__GLIBC__)
// Every training step allocates and frees tape buffers of a few hundred KB.
// Keeping them on the heap avoids an mmap/munmap pair per buffer.
[[maybe_unused]] const bool kHeapTuned = [] {
    mallopt(M_MMAP_THRESHOLD, 64 << 20);
    mallopt(M_TRIM_THRESHOLD, 256 << 20);
    return true;
}();
#endif

std::string shape_str(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw DimensionError("matrix data length does not match " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw DimensionError("ragged matrix literal");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

void Matrix::fill(double v) {
    for (double& x : data_) {
        x = v;
    }
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            t(c, r) = (*this)(r, c);
        }
    }
    return t;
}

bool Matrix::all_finite() const {
    for (double x : data_) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

bool Matrix::bit_equal(const Matrix& other) const {
    return same_shape(other) &&
           (data_.empty() ||
            std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(double)) == 0);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul shape mismatch " + shape_str(a) + " * " + shape_str(b));
    }
    Matrix c(a.rows(), b.cols());
    kernels::active().gemm(a.rows(), a.cols(), b.cols(), a.data(), b.data(), c.data(), false);
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw DimensionError("matmul_tn shape mismatch " + shape_str(a) + "^T * " + shape_str(b));
    }
    return matmul(a.transposed(), b);
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError("matmul_nt shape mismatch " + shape_str(a) + " * " + shape_str(b) + "^T");
    }
    return matmul(a, b.transposed());
}

void add_scaled(Matrix& y, const Matrix& x, double alpha) {
    if (!y.same_shape(x)) {
        throw DimensionError("add_scaled shape mismatch " + shape_str(y) + " vs " + shape_str(x));
    }
    kernels::active().axpy(y.size(), alpha, x.data(), y.data());
}

}  // namespace sizer::nn
