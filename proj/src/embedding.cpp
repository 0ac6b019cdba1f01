#include "icla/embedding.hpp"

namespace icla {

EmbeddingBatch concat(const EmbeddingBatch& a, const EmbeddingBatch& b) {
    EmbeddingBatch out{nn::vstack(a.points, b.points), a.labels};
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    return out;
}

std::vector<std::size_t> rows_of_class(const std::vector<int>& labels, int class_id) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == class_id) rows.push_back(i);
    }
    return rows;
}

}  // namespace icla
