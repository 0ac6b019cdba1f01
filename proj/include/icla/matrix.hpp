#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace icla::nn {

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// out = a * b^T  (a: n x k, b: m x k)
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// out = a * b    (a: n x k, b: k x m)
Matrix matmul_nn(const Matrix& a, const Matrix& b);
// out = a^T * b  (a: k x n, b: k x m)
Matrix matmul_tn(const Matrix& a, const Matrix& b);

// Rows of `m` selected by `indices`, in order.
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> indices);
// Row-wise concatenation; column counts must agree (empty operands are skipped).
Matrix vstack(const Matrix& top, const Matrix& bottom);

}  // namespace icla::nn
