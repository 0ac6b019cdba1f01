#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "icla/gmm.hpp"
#include "icla/matrix.hpp"
#include "icla/model.hpp"
#include "icla/rng.hpp"
#include "icla/task_stream.hpp"

namespace icla::replay {

using nn::Matrix;

struct ClassAcceptance {
    int class_id = 0;
    std::size_t attempts = 0;
    std::size_t accepted = 0;
    double rate() const noexcept {
        return attempts ? static_cast<double>(accepted) / static_cast<double>(attempts) : 0.0;
    }
};

// Decoded GMM samples: inputs = decode(embeddings), labels = source component.
struct PseudoDataset {
    Matrix inputs;
    std::vector<int> labels;
    Matrix embeddings;
    std::vector<ClassAcceptance> acceptance;

    std::size_t size() const noexcept { return labels.size(); }
    TaskDataset as_task() const;
    EmbeddingBatch as_embeddings() const;
};

struct PseudoOptions {
    std::size_t per_class = 1000;
    double tau = 0.9;
    std::size_t max_attempts = 20000;   // per class
    bool require_argmax = true;         // sampled component must equal the prediction
};

// Rejection-samples `per_class` accepted pseudo points for every component.
// A candidate z is decoded and re-classified; it is kept iff the prediction
// confidence is >= tau (and the prediction equals the component, when
// required). Each class uses its own substream of `seed`. A class that keeps
// some but fewer than per_class samples is topped up by cycling its accepted
// samples; a class that keeps none raises ReplayStarvation.
PseudoDataset generate_pseudo(const gmm::GaussianMixture& gmm, const model::NetworkParams& params,
                              const PseudoOptions& options, std::uint64_t seed);

// Fixed-capacity store of raw samples, balanced across every class seen.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 0) : capacity_(capacity) {}

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept;
    const std::map<int, Matrix>& classes() const noexcept { return store_; }
    std::size_t count(int class_id) const noexcept;

    // Re-balances to floor(capacity / classes_seen) per class: excess stored
    // rows are dropped uniformly at random; classes of `task` are filled by a
    // uniform draw from the task (for a class already stored, from the union
    // of stored and new rows).
    void update(const TaskDataset& task, Rng& rng);

    TaskDataset contents() const;

    // Restores a serialized state.
    static ReplayBuffer from_parts(std::size_t capacity, std::map<int, Matrix> store);

private:
    std::size_t capacity_;
    std::map<int, Matrix> store_;
};

// Exact concatenation of every past task's training data.
TaskDataset full_replay_store(std::span<const TaskDataset> past_tasks);

}  // namespace icla::replay
