#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "icla/embedding.hpp"
#include "icla/matrix.hpp"
#include "icla/rng.hpp"

namespace icla::swd {

using nn::Matrix;

struct SwdConfig {
    std::size_t num_projections = 50;
    std::uint64_t seed = 0;
};

struct SwdResult {
    double value = 0.0;
    Matrix grad;  // d value / d a, same shape as a
};

// L unit directions in R^f (normalized standard Gaussians), one per row.
Matrix draw_directions(std::size_t count, std::size_t dim, Rng& rng);

// Sliced squared-W2 between point sets a (n x f) and b (m x f) along the
// given directions: per direction, sort both projections (stable, so ties
// keep index order), match a's order statistics to b's quantile function
// (linear interpolation at levels (i + 1/2)/n) and average the squared gaps;
// the result is the mean over directions.
SwdResult swd2(const Matrix& a, const Matrix& b, const Matrix& directions);
SwdResult swd2(const Matrix& a, const Matrix& b, const SwdConfig& config);

// Sum over `shared_classes` of swd2 between the class-restricted subsets of
// `current` and `pseudo`; the gradient is with respect to current.points.
SwdResult class_conditional_swd(const EmbeddingBatch& current, const EmbeddingBatch& pseudo,
                                std::span<const int> shared_classes, const Matrix& directions);

}  // namespace icla::swd
