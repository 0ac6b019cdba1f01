#include "icla/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "icla/errors.hpp"

namespace icla::nn {

namespace {

void require_same_shape(const char* op, const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": shape mismatch");
    }
}

}  // namespace

Matrix softmax(const Matrix& logits) {
    Matrix p = logits;
    for (std::size_t r = 0; r < p.rows(); ++r) {
        auto row = p.row(r);
        if (row.empty()) continue;
        const double m = *std::max_element(row.begin(), row.end());
        double sum = 0.0;
        for (double& v : row) {
            v = std::exp(v - m);
            sum += v;
        }
        for (double& v : row) v /= sum;
    }
    return p;
}

LossGrad cross_entropy(const Matrix& logits, const Matrix& onehot) {
    require_same_shape("cross_entropy", logits, onehot);
    const std::size_t n = logits.rows();
    LossGrad out{0.0, Matrix(n, logits.cols())};
    if (n == 0) return out;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        auto z = logits.row(r);
        auto y = onehot.row(r);
        const double m = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (double v : z) sum += std::exp(v - m);
        const double log_norm = m + std::log(sum);
        auto g = out.grad.row(r);
        for (std::size_t c = 0; c < z.size(); ++c) {
            const double log_p = z[c] - log_norm;
            if (y[c] != 0.0) out.loss -= y[c] * log_p;
            g[c] = (std::exp(log_p) - y[c]) * inv_n;
        }
    }
    out.loss *= inv_n;
    return out;
}

LossGrad l2_reconstruction(const Matrix& xhat, const Matrix& x) {
    require_same_shape("l2_reconstruction", xhat, x);
    const std::size_t n = x.rows();
    LossGrad out{0.0, Matrix(n, x.cols())};
    if (n == 0) return out;
    const double inv_n = 1.0 / static_cast<double>(n);
    auto a = xhat.values();
    auto b = x.values();
    auto g = out.grad.values();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        out.loss += diff * diff;
        g[i] = 2.0 * diff * inv_n;
    }
    out.loss *= inv_n;
    return out;
}

Matrix onehot(std::span<const int> labels, std::size_t num_classes) {
    Matrix y(labels.size(), num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
            throw DimensionError("onehot: label " + std::to_string(labels[i]) +
                                 " out of range for " + std::to_string(num_classes) + " classes");
        }
        y(i, static_cast<std::size_t>(labels[i])) = 1.0;
    }
    return y;
}

}  // namespace icla::nn
