#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "icla/layers.hpp"

namespace icla::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

// Adam moments for one layer stack. The step counter is bumped before the
// bias correction is computed, so the first update uses step = 1.
struct AdamState {
    std::size_t step = 0;
    AdamConfig config;
    std::vector<LayerGrad> first;
    std::vector<LayerGrad> second;

    static AdamState for_layers(std::span<const DenseLayer> layers, AdamConfig config = {});
    // Appends `extra` zeroed output rows to the moments of layer `index`.
    void grow_outputs(std::size_t index, std::size_t extra);

    friend bool operator==(const AdamState&, const AdamState&) = default;
};

// Throws NumericError (and leaves everything untouched) if any gradient is non-finite.
void adam_step(std::span<DenseLayer> layers, std::span<const LayerGrad> grads, AdamState& state);

// Core update on flat arrays; `step` is the already-incremented step count.
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> first, std::span<double> second,
                 const AdamConfig& config, std::size_t step);

}  // namespace icla::nn
