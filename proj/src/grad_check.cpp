#include "icla/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "icla/errors.hpp"

namespace icla::nn {

double relative_error(double analytic, double numeric, double floor) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / denom;
}

GradCheckResult grad_check(std::span<const std::span<double>> params,
                           std::span<const std::span<const double>> analytic,
                           const std::function<double()>& loss, double h) {
    if (params.size() != analytic.size()) throw DimensionError("grad_check: view count mismatch");
    GradCheckResult result;
    for (std::size_t v = 0; v < params.size(); ++v) {
        if (params[v].size() != analytic[v].size()) {
            throw DimensionError("grad_check: parameter/gradient size mismatch");
        }
        for (std::size_t i = 0; i < params[v].size(); ++i) {
            double& p = params[v][i];
            const double saved = p;
            p = saved + h;
            const double up = loss();
            p = saved - h;
            const double down = loss();
            p = saved;
            const double numeric = (up - down) / (2.0 * h);
            result.max_rel_error =
                std::max(result.max_rel_error, relative_error(analytic[v][i], numeric));
            ++result.checked;
        }
    }
    return result;
}

std::vector<std::span<double>> parameter_views(std::span<DenseLayer> layers) {
    std::vector<std::span<double>> views;
    for (auto& l : layers) {
        views.push_back(l.weights.values());
        views.push_back(l.bias);
    }
    return views;
}

std::vector<std::span<const double>> gradient_views(std::span<const LayerGrad> grads) {
    std::vector<std::span<const double>> views;
    for (const auto& g : grads) {
        views.push_back(g.weights.values());
        views.push_back(g.bias);
    }
    return views;
}

GradCheckResult grad_check(std::vector<DenseLayer>& layers, const OutputLoss& loss_fn,
                           const Matrix& x, const Matrix& y, double h) {
    const ForwardCache cache = forward(layers, x);
    Matrix out_grad;
    loss_fn(cache.output(), y, out_grad);
    const BackwardResult br = backward(layers, cache, out_grad, false);
    auto params = parameter_views(layers);
    auto grads = gradient_views(br.grads);
    return grad_check(params, grads, [&] {
        Matrix scratch;
        return loss_fn(predict(layers, x), y, scratch);
    }, h);
}

}  // namespace icla::nn
