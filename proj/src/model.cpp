#include "icla/model.hpp"

#include <algorithm>

#include "icla/errors.hpp"
#include "icla/grad_check.hpp"
#include "icla/losses.hpp"

namespace icla::model {

Architecture mlp_embedding32(std::size_t input_dim) {
    return Architecture{input_dim, {512, 256}, 32, Activation::relu, Activation::relu,
                        Activation::sigmoid};
}

Architecture mlp_100(std::size_t input_dim) {
    return Architecture{input_dim, {}, 100, Activation::relu, Activation::relu,
                        Activation::sigmoid};
}

NetworkParams NetworkParams::init(const Architecture& arch, std::size_t num_classes, Rng& rng) {
    if (arch.input_dim == 0 || arch.embedding_dim == 0) {
        throw ArgumentError("Architecture: input and embedding sizes must be positive");
    }
    std::vector<std::size_t> sizes{arch.input_dim};
    sizes.insert(sizes.end(), arch.hidden.begin(), arch.hidden.end());
    sizes.push_back(arch.embedding_dim);

    NetworkParams p;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        const bool last = i + 2 == sizes.size();
        p.encoder.push_back(DenseLayer::glorot(
            sizes[i], sizes[i + 1], last ? arch.embedding_activation : arch.hidden_activation, rng));
    }
    for (std::size_t i = sizes.size() - 1; i > 0; --i) {
        const bool last = i == 1;
        p.decoder.push_back(DenseLayer::glorot(
            sizes[i], sizes[i - 1], last ? arch.output_activation : arch.hidden_activation, rng));
    }
    p.head = DenseLayer::glorot(arch.embedding_dim, num_classes, Activation::linear, rng);
    return p;
}

NetworkGrads NetworkGrads::zeros_like(const NetworkParams& params) {
    return NetworkGrads{nn::zero_grads(params.encoder), nn::zero_grads(params.decoder),
                        LayerGrad::zeros_like(params.head)};
}

void NetworkGrads::add(const NetworkGrads& other) {
    for (std::size_t i = 0; i < encoder.size(); ++i) encoder[i].add(other.encoder[i]);
    for (std::size_t i = 0; i < decoder.size(); ++i) decoder[i].add(other.decoder[i]);
    head.add(other.head);
}

bool NetworkGrads::all_finite() const noexcept {
    auto ok = [](const LayerGrad& g) { return g.all_finite(); };
    return std::all_of(encoder.begin(), encoder.end(), ok) &&
           std::all_of(decoder.begin(), decoder.end(), ok) && head.all_finite();
}

NetworkOptimizer NetworkOptimizer::for_params(const NetworkParams& params, nn::AdamConfig config) {
    return NetworkOptimizer{nn::AdamState::for_layers(params.encoder, config),
                            nn::AdamState::for_layers(params.decoder, config),
                            nn::AdamState::for_layers(std::span(&params.head, 1), config)};
}

void NetworkOptimizer::step(NetworkParams& params, const NetworkGrads& grads) {
    if (!grads.all_finite()) throw NumericError("optimizer step: non-finite gradient");
    nn::adam_step(params.encoder, grads.encoder, encoder);
    nn::adam_step(params.decoder, grads.decoder, decoder);
    nn::adam_step(std::span(&params.head, 1), std::span(&grads.head, 1), head);
}

Matrix encode(const NetworkParams& params, const Matrix& x) {
    return nn::predict(params.encoder, x);
}

Matrix decode(const NetworkParams& params, const Matrix& z) {
    return nn::predict(params.decoder, z);
}

Matrix logits(const NetworkParams& params, const Matrix& z) {
    return nn::predict(std::span(&params.head, 1), z);
}

Matrix classify(const NetworkParams& params, const Matrix& z) {
    return nn::softmax(logits(params, z));
}

std::vector<int> argmax_rows(const Matrix& m) {
    std::vector<int> out(m.rows(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        out[r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return out;
}

void expand_head(NetworkParams& params, std::size_t k_new, Rng& rng) {
    if (k_new == 0) return;
    DenseLayer& head = params.head;
    const std::size_t in = head.in();
    const std::size_t old_out = head.out();
    // Fresh rows follow the same init scale a head of the new width would get.
    const DenseLayer fresh =
        DenseLayer::glorot(in, old_out + k_new, head.activation, rng);
    std::vector<double> data(head.weights.values().begin(), head.weights.values().end());
    data.insert(data.end(), fresh.weights.values().begin() + static_cast<std::ptrdiff_t>(old_out * in),
                fresh.weights.values().end());
    head.weights = Matrix(old_out + k_new, in, std::move(data));
    head.bias.resize(old_out + k_new, 0.0);
}

void expand_head(NetworkOptimizer& optimizer, std::size_t k_new) {
    if (k_new == 0) return;
    optimizer.head.grow_outputs(0, k_new);
}

std::vector<std::span<double>> parameter_views(NetworkParams& params) {
    auto views = nn::parameter_views(params.encoder);
    auto dec = nn::parameter_views(params.decoder);
    auto head = nn::parameter_views(std::span(&params.head, 1));
    views.insert(views.end(), dec.begin(), dec.end());
    views.insert(views.end(), head.begin(), head.end());
    return views;
}

std::vector<std::span<const double>> gradient_views(const NetworkGrads& grads) {
    auto views = nn::gradient_views(grads.encoder);
    auto dec = nn::gradient_views(grads.decoder);
    auto head = nn::gradient_views(std::span(&grads.head, 1));
    views.insert(views.end(), dec.begin(), dec.end());
    views.insert(views.end(), head.begin(), head.end());
    return views;
}

}  // namespace icla::model
