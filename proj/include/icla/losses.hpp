#pragma once

#include <span>
#include <vector>

#include "icla/matrix.hpp"

namespace icla::nn {

struct LossGrad {
    double loss = 0.0;
    Matrix grad;
};

// Row-wise softmax with max subtraction.
Matrix softmax(const Matrix& logits);

// Mean over the batch of -log softmax(logits)[true class];
// gradient (softmax - onehot) / batch.
LossGrad cross_entropy(const Matrix& logits, const Matrix& onehot);

// Mean over the batch of the squared Euclidean distance; gradient 2 (xhat - x) / batch.
LossGrad l2_reconstruction(const Matrix& xhat, const Matrix& x);

Matrix onehot(std::span<const int> labels, std::size_t num_classes);

}  // namespace icla::nn
