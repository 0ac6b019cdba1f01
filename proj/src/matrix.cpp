#include "icla/matrix.hpp"

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "icla/errors.hpp"

namespace icla::nn {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap view(const Matrix& m) { return {m.data(), Eigen::Index(m.rows()), Eigen::Index(m.cols())}; }
MutMap view(Matrix& m) { return {m.data(), Eigen::Index(m.rows()), Eigen::Index(m.cols())}; }

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
    throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                             " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

bool Matrix::all_finite() const noexcept {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) shape_error("matmul_nt", a, b);
    Matrix out(a.rows(), b.rows());
    if (out.empty()) return out;
    if (a.cols() == 0) return out;
    view(out).noalias() = view(a) * view(b).transpose();
    return out;
}

Matrix matmul_nn(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) shape_error("matmul_nn", a, b);
    Matrix out(a.rows(), b.cols());
    if (out.empty() || a.cols() == 0) return out;
    view(out).noalias() = view(a) * view(b);
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) shape_error("matmul_tn", a, b);
    Matrix out(a.cols(), b.cols());
    if (out.empty() || a.rows() == 0) return out;
    view(out).noalias() = view(a).transpose() * view(b);
    return out;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> indices) {
    Matrix out(indices.size(), m.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= m.rows()) throw DimensionError("gather_rows: index out of range");
        auto src = m.row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
    if (top.rows() == 0) return bottom;
    if (bottom.rows() == 0) return top;
    if (top.cols() != bottom.cols()) shape_error("vstack", top, bottom);
    std::vector<double> data;
    data.reserve(top.size() + bottom.size());
    data.insert(data.end(), top.values().begin(), top.values().end());
    data.insert(data.end(), bottom.values().begin(), bottom.values().end());
    return Matrix(top.rows() + bottom.rows(), top.cols(), std::move(data));
}

}  // namespace icla::nn
