#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "icla/matrix.hpp"
#include "icla/rng.hpp"

namespace icla::nn {

enum class Activation { relu, sigmoid, linear };

Activation parse_activation(std::string_view name);
std::string_view to_string(Activation a) noexcept;

struct DenseLayer {
    Matrix weights;             // out x in
    std::vector<double> bias;   // out
    Activation activation = Activation::linear;

    std::size_t in() const noexcept { return weights.cols(); }
    std::size_t out() const noexcept { return weights.rows(); }

    // Weights uniform in +-sqrt(6 / (in + out)), zero bias.
    static DenseLayer glorot(std::size_t in, std::size_t out, Activation act, Rng& rng);
    static DenseLayer zeros(std::size_t in, std::size_t out, Activation act);

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Gradient (or Adam moment) shaped like a DenseLayer's parameters.
struct LayerGrad {
    Matrix weights;
    std::vector<double> bias;

    static LayerGrad zeros_like(const DenseLayer& layer);
    void add(const LayerGrad& other);
    void scale(double factor);
    bool all_finite() const noexcept;

    friend bool operator==(const LayerGrad&, const LayerGrad&) = default;
};

std::vector<LayerGrad> zero_grads(std::span<const DenseLayer> layers);

// activations[0] is the input; activations[i + 1] is the output of layer i.
struct ForwardCache {
    std::vector<Matrix> activations;
    const Matrix& output() const { return activations.back(); }
};

ForwardCache forward(std::span<const DenseLayer> layers, const Matrix& x);
// Output of the stack only; no intermediate storage.
Matrix predict(std::span<const DenseLayer> layers, const Matrix& x);

struct BackwardResult {
    std::vector<LayerGrad> grads;
    Matrix input_grad;  // empty unless requested
};

// Backpropagates dL/d(output) through a stack whose forward pass produced `cache`.
BackwardResult backward(std::span<const DenseLayer> layers, const ForwardCache& cache,
                        const Matrix& output_grad, bool want_input_grad = true);

void apply_activation(Activation act, Matrix& m);

}  // namespace icla::nn
