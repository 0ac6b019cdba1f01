#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "icla/layers.hpp"

namespace icla::harness {

// One experiment: a protocol, a strategy and the trainer settings, run once
// per seed. Optional fields fall back to per-protocol defaults.
struct ExperimentConfig {
    std::string protocol = "blobs3T";
    std::string strategy = "icla";
    std::vector<std::uint64_t> seeds{1};
    std::string output_dir = "runs";
    std::string data_dir;  // empty: ICLA_DATA_DIR
    std::size_t jobs = 0;  // worker threads, 0: one per hardware thread

    double gamma = 1.0;
    double lambda = 0.1;
    double tau = 0.9;
    std::size_t epochs_per_task = 100;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    std::size_t swd_projections = 50;
    std::size_t pseudo_per_class = 0;
    std::size_t max_attempts_factor = 20;
    bool require_argmax = true;
    std::string covariance = "full";
    double ridge = 1e-6;
    double max_ridge = 1e-2;
    std::optional<std::size_t> buffer_capacity;

    double train_fraction = 1.0;
    double test_fraction = 1.0;
    std::uint64_t data_seed = 0;
    std::size_t permuted_tasks = 5;

    std::optional<std::vector<std::size_t>> hidden;
    std::optional<std::size_t> embedding_dim;
    std::optional<nn::Activation> hidden_activation;
    std::optional<nn::Activation> embedding_activation;
    std::optional<nn::Activation> output_activation;

    bool keep_snapshots = true;

    void validate() const;
};

// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

// Every key accepted by config_from_json.
const std::vector<std::string>& config_keys();

// Hex digest of the settings that influence results (not output_dir,
// data_dir, jobs or keep_snapshots).
std::string config_hash(const ExperimentConfig& cfg);

// <output_dir>/<protocol>-<strategy>-<hash>
std::filesystem::path experiment_dir(const ExperimentConfig& cfg);

}  // namespace icla::harness
