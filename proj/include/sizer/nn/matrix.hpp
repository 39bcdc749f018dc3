#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sizer::nn {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] double* data() noexcept { return data_.data(); }
    [[nodiscard]] const double* data() const noexcept { return data_.data(); }
    [[nodiscard]] std::span<double> values() noexcept { return data_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }
    [[nodiscard]] std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    void fill(double v);
    [[nodiscard]] Matrix transposed() const;
    [[nodiscard]] bool all_finite() const;
    [[nodiscard]] bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    /// Bitwise equality of shape and every element.
    [[nodiscard]] bool bit_equal(const Matrix& other) const;
    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// A · B
Matrix matmul(const Matrix& a, const Matrix& b);
/// Aᵀ · B
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// A · Bᵀ
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// y += alpha * x (same shape).
void add_scaled(Matrix& y, const Matrix& x, double alpha = 1.0);

}  // namespace sizer::nn
