#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icla/matrix.hpp"
#include "icla/task_stream.hpp"

namespace icla::data {

// Standard train/test split of an IDX image dataset (MNIST layout).
struct ImageDataset {
    nn::Matrix train_x;
    std::vector<int> train_y;
    nn::Matrix test_x;
    std::vector<int> test_y;
};

// Reads train-images-idx3-ubyte, train-labels-idx1-ubyte, t10k-images-idx3-ubyte
// and t10k-labels-idx1-ubyte from `dir`.
ImageDataset load_image_dataset(const std::filesystem::path& dir);

// Directory holding `name` ("mnist" or "fashion-mnist") under `data_dir`; if
// `data_dir` is empty the ICLA_DATA_DIR environment variable is used. Returns
// nullopt when the files are not there.
std::optional<std::filesystem::path> locate_dataset(std::string_view name,
                                                    const std::filesystem::path& data_dir = {});

enum class Protocol { mnist9T, fmnist4T, mnist5T, mnist2T };

Protocol parse_protocol(std::string_view name);
std::string_view to_string(Protocol p) noexcept;
// Class groups per task, e.g. mnist2T = {{0..4}, {5..9}}.
std::vector<std::vector<int>> protocol_classes(Protocol p);

// Seeded per-class fraction of a split (1.0 keeps everything, in order).
struct Subsample {
    double train_fraction = 1.0;
    double test_fraction = 1.0;
    std::uint64_t seed = 0;
};

TaskStream make_incremental_stream(const ImageDataset& dataset, Protocol protocol,
                                   const Subsample& subsample = {});

// Task 1: digits {0, 1} unpermuted; task t >= 2: digits {0 .. 2t-1} under a
// fresh seeded pixel permutation.
TaskStream make_permuted_stream(const ImageDataset& dataset, std::size_t num_tasks,
                                std::uint64_t seed, const Subsample& subsample = {});

// Permutation used by task `t` (0-based) of a permuted stream; identity for t = 0.
std::vector<std::size_t> task_permutation(std::size_t dim, std::size_t t, std::uint64_t seed);
nn::Matrix permute_columns(const nn::Matrix& x, const std::vector<std::size_t>& perm);

struct BlobClass {
    int class_id = 0;
    std::vector<double> mean;
    nn::Matrix covariance;  // empty means identity
    std::size_t n_train = 500;
    std::size_t n_test = 200;
};

struct BlobTask {
    std::vector<BlobClass> classes;
};

struct BlobStreamSpec {
    std::string name;
    std::size_t dim = 2;
    std::vector<BlobTask> tasks;
};

TaskStream make_blob_stream(const BlobStreamSpec& spec, std::uint64_t seed);

// Classes {0,1} at (+-3, 0), then {2,3} at (0, +-6).
BlobStreamSpec blobs_two_task();
// Six classes on a circle of radius 6, two per task.
BlobStreamSpec blobs_three_task();
// Class 0 drifts from (3,0) to (4,0) in task 2, which also adds class 2.
BlobStreamSpec blobs_drift();

}  // namespace icla::data
