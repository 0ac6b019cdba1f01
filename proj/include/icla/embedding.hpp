#pragma once

#include <vector>

#include "icla/matrix.hpp"

namespace icla {

// Points in the embedding space with their global class indices.
struct EmbeddingBatch {
    nn::Matrix points;
    std::vector<int> labels;

    std::size_t size() const noexcept { return labels.size(); }
};

EmbeddingBatch concat(const EmbeddingBatch& a, const EmbeddingBatch& b);

// Row indices whose label equals `class_id`, in ascending order.
std::vector<std::size_t> rows_of_class(const std::vector<int>& labels, int class_id);

}  // namespace icla
