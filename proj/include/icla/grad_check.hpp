#pragma once

#include <functional>
#include <span>
#include <vector>

#include "icla/layers.hpp"

namespace icla::nn {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
};

// Relative error used by every gradient check: |a - n| / max(|a|, |n|, floor).
double relative_error(double analytic, double numeric, double floor = 1e-6);

// Compares `analytic` against central differences of `loss` taken by
// perturbing each entry of `params` by +-h. Parameters are restored.
GradCheckResult grad_check(std::span<const std::span<double>> params,
                           std::span<const std::span<const double>> analytic,
                           const std::function<double()>& loss, double h = 1e-5);

// Loss on a stack's output: returns the loss and writes dL/d(output).
using OutputLoss = std::function<double(const Matrix& output, const Matrix& target, Matrix& grad)>;

// Gradient check of a plain layer stack under `loss_fn`.
GradCheckResult grad_check(std::vector<DenseLayer>& layers, const OutputLoss& loss_fn,
                           const Matrix& x, const Matrix& y, double h = 1e-5);

std::vector<std::span<double>> parameter_views(std::span<DenseLayer> layers);
std::vector<std::span<const double>> gradient_views(std::span<const LayerGrad> grads);

}  // namespace icla::nn
