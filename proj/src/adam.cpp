#include "icla/adam.hpp"

#include <cmath>

#include "icla/errors.hpp"

namespace icla::nn {

AdamState AdamState::for_layers(std::span<const DenseLayer> layers, AdamConfig config) {
    if (!(config.beta1 > 0.0 && config.beta1 < 1.0 && config.beta2 > 0.0 && config.beta2 < 1.0)) {
        throw ArgumentError("AdamState: betas must lie in (0, 1)");
    }
    AdamState s;
    s.config = config;
    s.first = zero_grads(layers);
    s.second = zero_grads(layers);
    return s;
}

namespace {

void grow(LayerGrad& g, std::size_t extra) {
    const std::size_t cols = g.weights.cols();
    std::vector<double> data(g.weights.values().begin(), g.weights.values().end());
    data.resize(data.size() + extra * cols, 0.0);
    g.weights = Matrix(g.weights.rows() + extra, cols, std::move(data));
    g.bias.resize(g.bias.size() + extra, 0.0);
}

}  // namespace

void AdamState::grow_outputs(std::size_t index, std::size_t extra) {
    if (index >= first.size()) throw ArgumentError("AdamState::grow_outputs: bad layer index");
    grow(first[index], extra);
    grow(second[index], extra);
}

void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> first, std::span<double> second,
                 const AdamConfig& c, std::size_t step) {
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        first[i] = c.beta1 * first[i] + (1.0 - c.beta1) * g;
        second[i] = c.beta2 * second[i] + (1.0 - c.beta2) * g * g;
        const double m_hat = first[i] / bc1;
        const double v_hat = second[i] / bc2;
        params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
}

void adam_step(std::span<DenseLayer> layers, std::span<const LayerGrad> grads, AdamState& state) {
    if (grads.size() != layers.size() || state.first.size() != layers.size()) {
        throw DimensionError("adam_step: layer/gradient/state count mismatch");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (grads[i].weights.rows() != layers[i].out() || grads[i].weights.cols() != layers[i].in() ||
            grads[i].bias.size() != layers[i].out() ||
            state.first[i].weights.size() != layers[i].weights.size()) {
            throw DimensionError("adam_step: gradient shape mismatch at layer " + std::to_string(i));
        }
        if (!grads[i].all_finite()) {
            throw NumericError("adam_step: non-finite gradient at layer " + std::to_string(i));
        }
    }
    ++state.step;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        adam_update(layers[i].weights.values(), grads[i].weights.values(),
                    state.first[i].weights.values(), state.second[i].weights.values(),
                    state.config, state.step);
        adam_update(layers[i].bias, grads[i].bias, state.first[i].bias, state.second[i].bias,
                    state.config, state.step);
    }
}

}  // namespace icla::nn
