#pragma once

#include <cstddef>
#include <vector>

#include "icla/adam.hpp"
#include "icla/layers.hpp"
#include "icla/matrix.hpp"
#include "icla/rng.hpp"

namespace icla::model {

using nn::Activation;
using nn::DenseLayer;
using nn::LayerGrad;
using nn::Matrix;

// Encoder d -> hidden... -> f; the decoder mirrors it back to d.
struct Architecture {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden;
    std::size_t embedding_dim = 0;
    Activation hidden_activation = Activation::relu;
    Activation embedding_activation = Activation::relu;
    Activation output_activation = Activation::sigmoid;

    friend bool operator==(const Architecture&, const Architecture&) = default;
};

// 784-512-256-32 ReLU encoder with a sigmoid reconstruction.
Architecture mlp_embedding32(std::size_t input_dim = 784);
// One hidden layer of 100 units used directly as the embedding.
Architecture mlp_100(std::size_t input_dim = 784);

struct NetworkParams {
    std::vector<DenseLayer> encoder;
    std::vector<DenseLayer> decoder;
    DenseLayer head;

    std::size_t input_dim() const noexcept { return encoder.front().in(); }
    std::size_t embedding_dim() const noexcept { return encoder.back().out(); }
    std::size_t num_classes() const noexcept { return head.out(); }

    static NetworkParams init(const Architecture& arch, std::size_t num_classes, Rng& rng);

    friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

struct NetworkGrads {
    std::vector<LayerGrad> encoder;
    std::vector<LayerGrad> decoder;
    LayerGrad head;

    static NetworkGrads zeros_like(const NetworkParams& params);
    void add(const NetworkGrads& other);
    bool all_finite() const noexcept;
};

// Adam moments for every sub-network.
struct NetworkOptimizer {
    nn::AdamState encoder;
    nn::AdamState decoder;
    nn::AdamState head;

    static NetworkOptimizer for_params(const NetworkParams& params, nn::AdamConfig config = {});
    void step(NetworkParams& params, const NetworkGrads& grads);

    friend bool operator==(const NetworkOptimizer&, const NetworkOptimizer&) = default;
};

Matrix encode(const NetworkParams& params, const Matrix& x);
Matrix decode(const NetworkParams& params, const Matrix& z);
Matrix logits(const NetworkParams& params, const Matrix& z);
// Softmax probabilities, batch x k.
Matrix classify(const NetworkParams& params, const Matrix& z);

std::vector<int> argmax_rows(const Matrix& m);

// Appends k_new freshly initialized output rows to the head. Existing rows
// are untouched; k_new == 0 is the identity.
void expand_head(NetworkParams& params, std::size_t k_new, Rng& rng);
// Same growth applied to optimizer moments (new rows zeroed).
void expand_head(NetworkOptimizer& optimizer, std::size_t k_new);

// Every parameter array in a fixed order (encoder, decoder, head).
std::vector<std::span<double>> parameter_views(NetworkParams& params);
std::vector<std::span<const double>> gradient_views(const NetworkGrads& grads);

}  // namespace icla::model
