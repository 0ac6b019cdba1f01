#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "icla/config.hpp"
#include "icla/gmm.hpp"
#include "icla/model.hpp"
#include "icla/task_stream.hpp"
#include "icla/trainer.hpp"

namespace icla::harness {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_data = 3,
    exit_divergence = 4,
    exit_starvation = 5,
};

int exit_code_for(const std::exception& e) noexcept;

TaskStream build_stream(const ExperimentConfig& cfg);
model::Architecture architecture_for(const ExperimentConfig& cfg, const TaskStream& stream);
std::size_t default_buffer_capacity(const std::string& protocol);
train::IclaConfig trainer_config(const ExperimentConfig& cfg, std::uint64_t seed);

// Pseudo samples per class drawn while learning task `t` (0-based), 0 when
// the strategy does not generate any.
std::size_t pseudo_per_class_at(const ExperimentConfig& cfg, const TaskStream& stream,
                                std::size_t t);

// Layout of an experiment directory.
std::filesystem::path curve_path(const std::filesystem::path& dir, std::uint64_t seed);
std::filesystem::path timing_path(const std::filesystem::path& dir, std::uint64_t seed);
std::filesystem::path state_path(const std::filesystem::path& dir, std::uint64_t seed);
// Parameters and mixture after task `task` (1-based).
std::filesystem::path params_snapshot_path(const std::filesystem::path& dir, std::uint64_t seed,
                                           std::size_t task);
std::filesystem::path gmm_snapshot_path(const std::filesystem::path& dir, std::uint64_t seed,
                                        std::size_t task);

struct RunOptions {
    bool resume = false;     // continue from the last per-task checkpoint
    std::ostream* log = nullptr;
};

struct SeedOutcome {
    std::uint64_t seed = 0;
    int exit_code = exit_ok;
    std::string error;
    train::LearningCurve curve;
};

struct ExperimentResult {
    std::filesystem::path dir;
    std::vector<SeedOutcome> seeds;
    int exit_code = exit_ok;  // first failing seed's code
};

// Runs every seed (concurrently, up to cfg.jobs) and writes per-seed curves,
// timing sidecars, checkpoints, aggregate.csv and manifest.json. Trainer
// errors are caught per seed and reported through the exit code; the
// manifest marks the run partial.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});
ExperimentResult run_experiment(const ExperimentConfig& cfg, const TaskStream& stream,
                                const RunOptions& options = {});

// Mixture kept for the audit when the strategy has none of its own: the MAP
// fit of every training sample seen so far.
gmm::GaussianMixture diagnostic_mixture(const model::NetworkParams& params,
                                        const TaskStream& stream, std::size_t tasks_seen,
                                        const gmm::FitOptions& options);

struct EmbeddingDump {
    nn::Matrix points;
    std::vector<int> labels;
    std::vector<std::size_t> tasks;  // 1-based
};

// Test split of every task, in stream order.
EmbeddingDump dump_embeddings(const model::NetworkParams& params, const TaskStream& stream);
void write_embeddings_csv(std::ostream& out, const EmbeddingDump& dump);

struct ClusterSeparation {
    double min_centroid_distance = 0.0;  // between class centroids
    double mean_within_spread = 0.0;     // mean distance to own class centroid, averaged over classes
    double ratio = 0.0;
    // Largest distance between centroids of one class taken from different
    // tasks, relative to min_centroid_distance. 0 when no class spans tasks.
    double task_fragmentation = 0.0;

    bool separated(double factor = 3.0) const { return ratio > factor; }
};

ClusterSeparation cluster_separation(const EmbeddingDump& dump);

struct AuditRow {
    std::size_t task = 0;     // 1-based task being remembered
    std::size_t horizon = 0;  // 1-based task just learned
    double retained_accuracy = 0.0;
    double error = 0.0;       // 1 - retained_accuracy
    double swd_fit = 0.0;     // SWD estimate between phi(task data) and its fitted components
    double swd_drift_sum = 0.0;
    std::size_t drift_terms = 0;
    std::size_t pseudo_samples = 0;  // pseudo samples of the task's classes replayed at `horizon`
};

struct AuditReport {
    std::size_t num_tasks = 0;
    std::vector<AuditRow> rows;  // ordered by task, then horizon
    // Per remembered task: retained accuracy never rises by more than the
    // tolerance as the horizon grows.
    std::vector<bool> forgetting_monotone;
    // Per remembered task: the accumulated drift sum never shrinks.
    std::vector<bool> drift_sum_nondecreasing;
};

struct AuditInputs {
    train::LearningCurve curve;
    std::vector<gmm::GaussianMixture> mixtures;     // one per learned task
    std::vector<EmbeddingBatch> task_embeddings;     // task t training data under the encoder after task t
    std::vector<std::size_t> pseudo_per_class;      // per horizon
};

struct AuditOptions {
    std::size_t projections = 200;
    std::uint64_t seed = 0;
    double tolerance = 0.02;
};

AuditReport audit_forgetting(const TaskStream& stream, const AuditInputs& inputs,
                             const AuditOptions& options = {});

// Loads the curve and per-task snapshots of one seed from an experiment
// directory. Throws AuditError when a snapshot is missing.
AuditInputs load_audit_inputs(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                              const TaskStream& stream, std::uint64_t seed);

std::string audit_header();
void write_audit_csv(std::ostream& out, const AuditReport& report);
std::string format_audit_table(const AuditReport& report);

}  // namespace icla::harness
