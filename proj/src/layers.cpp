#include "icla/layers.hpp"

#include <cmath>
#include <string>

#include "icla/errors.hpp"

namespace icla::nn {

Activation parse_activation(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "linear") return Activation::linear;
    throw ArgumentError("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(Activation a) noexcept {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::linear: return "linear";
    }
    return "linear";
}

DenseLayer DenseLayer::glorot(std::size_t in, std::size_t out, Activation act, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer = zeros(in, out, act);
    for (double& w : layer.weights.values()) w = dist(rng);
    return layer;
}

DenseLayer DenseLayer::zeros(std::size_t in, std::size_t out, Activation act) {
    return DenseLayer{Matrix(out, in), std::vector<double>(out, 0.0), act};
}

LayerGrad LayerGrad::zeros_like(const DenseLayer& layer) {
    return LayerGrad{Matrix(layer.out(), layer.in()), std::vector<double>(layer.out(), 0.0)};
}

void LayerGrad::add(const LayerGrad& other) {
    if (other.weights.rows() != weights.rows() || other.weights.cols() != weights.cols() ||
        other.bias.size() != bias.size()) {
        throw DimensionError("LayerGrad::add: shape mismatch");
    }
    auto w = weights.values();
    auto ow = other.weights.values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += ow[i];
    for (std::size_t i = 0; i < bias.size(); ++i) bias[i] += other.bias[i];
}

void LayerGrad::scale(double factor) {
    for (double& w : weights.values()) w *= factor;
    for (double& b : bias) b *= factor;
}

bool LayerGrad::all_finite() const noexcept {
    if (!weights.all_finite()) return false;
    for (double b : bias) {
        if (!std::isfinite(b)) return false;
    }
    return true;
}

std::vector<LayerGrad> zero_grads(std::span<const DenseLayer> layers) {
    std::vector<LayerGrad> grads;
    grads.reserve(layers.size());
    for (const auto& l : layers) grads.push_back(LayerGrad::zeros_like(l));
    return grads;
}

void apply_activation(Activation act, Matrix& m) {
    switch (act) {
        case Activation::relu:
            for (double& v : m.values()) v = v > 0.0 ? v : 0.0;
            break;
        case Activation::sigmoid:
            for (double& v : m.values()) v = 1.0 / (1.0 + std::exp(-v));
            break;
        case Activation::linear:
            break;
    }
}

namespace {

Matrix layer_forward(const DenseLayer& layer, const Matrix& x) {
    if (x.cols() != layer.in()) {
        throw DimensionError("forward: input width " + std::to_string(x.cols()) +
                             " != layer input " + std::to_string(layer.in()));
    }
    Matrix y = matmul_nt(x, layer.weights);
    for (std::size_t r = 0; r < y.rows(); ++r) {
        auto row = y.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += layer.bias[c];
    }
    apply_activation(layer.activation, y);
    return y;
}

}  // namespace

ForwardCache forward(std::span<const DenseLayer> layers, const Matrix& x) {
    ForwardCache cache;
    cache.activations.reserve(layers.size() + 1);
    cache.activations.push_back(x);
    for (const auto& layer : layers) {
        cache.activations.push_back(layer_forward(layer, cache.activations.back()));
    }
    return cache;
}

Matrix predict(std::span<const DenseLayer> layers, const Matrix& x) {
    Matrix current = x;
    for (const auto& layer : layers) current = layer_forward(layer, current);
    return current;
}

BackwardResult backward(std::span<const DenseLayer> layers, const ForwardCache& cache,
                        const Matrix& output_grad, bool want_input_grad) {
    if (cache.activations.size() != layers.size() + 1) {
        throw DimensionError("backward: cache does not match layer stack");
    }
    const Matrix& out = cache.output();
    if (output_grad.rows() != out.rows() || output_grad.cols() != out.cols()) {
        throw DimensionError("backward: output gradient shape mismatch");
    }
    BackwardResult result;
    result.grads.resize(layers.size());
    Matrix delta = output_grad;
    for (std::size_t li = layers.size(); li-- > 0;) {
        const DenseLayer& layer = layers[li];
        const Matrix& y = cache.activations[li + 1];
        auto d = delta.values();
        auto yv = y.values();
        switch (layer.activation) {
            case Activation::relu:
                for (std::size_t i = 0; i < d.size(); ++i) {
                    if (yv[i] <= 0.0) d[i] = 0.0;
                }
                break;
            case Activation::sigmoid:
                for (std::size_t i = 0; i < d.size(); ++i) d[i] *= yv[i] * (1.0 - yv[i]);
                break;
            case Activation::linear:
                break;
        }
        LayerGrad g;
        g.weights = matmul_tn(delta, cache.activations[li]);
        g.bias.assign(layer.out(), 0.0);
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            auto row = delta.row(r);
            for (std::size_t c = 0; c < row.size(); ++c) g.bias[c] += row[c];
        }
        result.grads[li] = std::move(g);
        if (li > 0 || want_input_grad) delta = matmul_nn(delta, layer.weights);
    }
    if (want_input_grad) result.input_grad = std::move(delta);
    return result;
}

}  // namespace icla::nn
