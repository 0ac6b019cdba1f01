#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "icla/adam.hpp"
#include "icla/gmm.hpp"
#include "icla/model.hpp"
#include "icla/replay.hpp"
#include "icla/swd.hpp"
#include "icla/task_stream.hpp"

namespace icla::train {

using nn::Matrix;

enum class Strategy { icla, fr, mb, naive };

Strategy parse_strategy(std::string_view name);
std::string_view to_string(Strategy s) noexcept;

struct IclaConfig {
    double gamma = 1.0;    // reconstruction weight
    double lambda = 0.1;   // class-conditional alignment weight
    double tau = 0.9;      // pseudo-label confidence threshold
    std::size_t epochs_per_task = 100;
    std::size_t batch_size = 64;
    nn::AdamConfig adam;
    swd::SwdConfig swd;
    std::size_t pseudo_per_class = 0;  // 0: min(1000, smallest per-class count of the task)
    std::size_t max_attempts_factor = 20;
    bool require_argmax = true;
    gmm::FitOptions gmm;
    std::size_t buffer_capacity = 100;
    std::uint64_t seed = 1;

    void validate() const;
};

struct LossResult {
    double loss = 0.0;
    double classification = 0.0;
    double reconstruction = 0.0;
    double alignment = 0.0;
    model::NetworkGrads grads;
    std::vector<int> aligned_classes;  // shared classes that contributed this step
};

// Labeled minibatch. `embeddings` is only used for pseudo batches: the GMM
// samples that generated the inputs.
struct Batch {
    Matrix x;
    std::vector<int> labels;
    Matrix embeddings;
};

// mean CE(h(phi(x)), y) + gamma * mean ||psi(phi(x)) - x||^2
LossResult supervised_loss(const model::NetworkParams& params, const Matrix& x,
                           std::span<const int> labels, double gamma);

// supervised_loss(current) + supervised_loss(pseudo) + lambda * sum over shared classes of
// swd2(phi(current | j), pseudo GMM samples | j). A shared class absent from
// either half of the minibatch is skipped for this step.
LossResult rehearsal_loss(const model::NetworkParams& params, const Batch& current,
                          const Batch& pseudo, std::span<const int> shared_classes, double gamma,
                          double lambda, const Matrix& directions);

struct CurveRow {
    std::size_t task = 0;   // 1-based
    std::size_t epoch = 0;  // 0 = evaluation before training on the task
    double seen_accuracy = 0.0;
    std::vector<double> task_accuracy;  // one per stream task; NaN if not yet seen

    friend bool operator==(const CurveRow&, const CurveRow&) = default;
};

struct LearningCurve {
    std::size_t num_tasks = 0;
    std::vector<CurveRow> rows;
    // Final row of task `t` (1-based).
    const CurveRow& end_of_task(std::size_t t) const;
};

// Everything needed to continue a run at `next_task`.
struct TrainerState {
    std::size_t next_task = 0;  // 0-based index of the next task to learn
    model::NetworkParams params;
    model::NetworkOptimizer optimizer;
    std::optional<gmm::GaussianMixture> gmm;
    replay::ReplayBuffer buffer;
    LearningCurve curve;
    std::vector<replay::ClassAcceptance> last_acceptance;
};

struct RunHooks {
    std::function<void(const CurveRow&)> on_epoch;
    std::function<void(const TrainerState&)> on_task_end;
    const TrainerState* resume_from = nullptr;
};

struct RunResult {
    TrainerState state;
    std::vector<gmm::GaussianMixture> gmm_history;  // one per learned task (icla only)
};

RunResult run_strategy(const TaskStream& stream, const IclaConfig& config,
                       const model::Architecture& arch, Strategy strategy,
                       const RunHooks& hooks = {});

RunResult run_icla(const TaskStream& stream, const IclaConfig& config,
                   const model::Architecture& arch, const RunHooks& hooks = {});
RunResult run_baseline(const TaskStream& stream, const IclaConfig& config,
                       const model::Architecture& arch, Strategy strategy,
                       const RunHooks& hooks = {});

// Fraction of `data` whose argmax prediction matches its label.
double accuracy(const model::NetworkParams& params, const TaskDataset& data);

// Embeddings of `data` under the current encoder.
EmbeddingBatch embed(const model::NetworkParams& params, const TaskDataset& data);

std::size_t default_pseudo_per_class(const TaskDataset& task);

}  // namespace icla::train
