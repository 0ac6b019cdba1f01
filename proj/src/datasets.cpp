#include "icla/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

#include "icla/errors.hpp"
#include "icla/gmm.hpp"
#include "icla/idx.hpp"
#include "icla/rng.hpp"

namespace icla::data {

namespace fs = std::filesystem;

namespace {

constexpr const char* kTrainImages = "train-images-idx3-ubyte";
constexpr const char* kTrainLabels = "train-labels-idx1-ubyte";
constexpr const char* kTestImages = "t10k-images-idx3-ubyte";
constexpr const char* kTestLabels = "t10k-labels-idx1-ubyte";

bool has_dataset_files(const fs::path& dir) {
    for (const char* f : {kTrainImages, kTrainLabels, kTestImages, kTestLabels}) {
        if (!fs::is_regular_file(dir / f)) return false;
    }
    return true;
}

// Rows of `labels` in `classes`, keeping a seeded per-class fraction.
std::vector<std::size_t> select_rows(const std::vector<int>& labels, const std::vector<int>& classes,
                                     double fraction, std::uint64_t seed, std::string_view tag) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ArgumentError("subsample fraction must lie in (0, 1]");
    }
    std::vector<std::size_t> out;
    for (int c : classes) {
        auto rows = rows_of_class(labels, c);
        if (fraction < 1.0) {
            Rng rng = make_rng(seed, tag, static_cast<std::uint64_t>(c));
            std::shuffle(rows.begin(), rows.end(), rng);
            const auto keep = static_cast<std::size_t>(
                std::ceil(fraction * static_cast<double>(rows.size())));
            rows.resize(std::min(keep, rows.size()));
        }
        out.insert(out.end(), rows.begin(), rows.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

TaskDataset take(const nn::Matrix& x, const std::vector<int>& y, const std::vector<std::size_t>& rows,
                 const std::vector<int>& classes, std::string name) {
    TaskDataset d;
    d.x = nn::gather_rows(x, rows);
    d.labels.reserve(rows.size());
    for (std::size_t r : rows) d.labels.push_back(y[r]);
    d.class_set = classes;
    std::sort(d.class_set.begin(), d.class_set.end());
    d.name = std::move(name);
    return d;
}

std::string class_list(const std::vector<int>& classes) {
    std::string s;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(classes[i]);
    }
    return s;
}

}  // namespace

ImageDataset load_image_dataset(const fs::path& dir) {
    if (!has_dataset_files(dir)) {
        throw DataError("dataset files not found under " + dir.string());
    }
    ImageDataset d;
    d.train_x = idx_images(load_idx(dir / kTrainImages));
    d.train_y = idx_labels(load_idx(dir / kTrainLabels));
    d.test_x = idx_images(load_idx(dir / kTestImages));
    d.test_y = idx_labels(load_idx(dir / kTestLabels));
    if (d.train_x.rows() != d.train_y.size() || d.test_x.rows() != d.test_y.size()) {
        throw DataError("image/label count mismatch under " + dir.string());
    }
    return d;
}

std::optional<fs::path> locate_dataset(std::string_view name, const fs::path& data_dir) {
    fs::path root = data_dir;
    if (root.empty()) {
        if (const char* env = std::getenv("ICLA_DATA_DIR")) root = env;
    }
    if (root.empty()) return std::nullopt;
    for (const fs::path& candidate : {root / std::string(name), root}) {
        if (has_dataset_files(candidate)) return candidate;
    }
    return std::nullopt;
}

Protocol parse_protocol(std::string_view name) {
    if (name == "mnist9T") return Protocol::mnist9T;
    if (name == "fmnist4T") return Protocol::fmnist4T;
    if (name == "mnist5T") return Protocol::mnist5T;
    if (name == "mnist2T") return Protocol::mnist2T;
    throw ArgumentError("unknown protocol '" + std::string(name) + "'");
}

std::string_view to_string(Protocol p) noexcept {
    switch (p) {
        case Protocol::mnist9T: return "mnist9T";
        case Protocol::fmnist4T: return "fmnist4T";
        case Protocol::mnist5T: return "mnist5T";
        case Protocol::mnist2T: return "mnist2T";
    }
    return "mnist9T";
}

std::vector<std::vector<int>> protocol_classes(Protocol p) {
    switch (p) {
        case Protocol::mnist9T: {
            std::vector<std::vector<int>> tasks{{0, 1}};
            for (int c = 2; c <= 9; ++c) tasks.push_back({c});
            return tasks;
        }
        case Protocol::fmnist4T:
            return {{0, 1}, {2, 3}, {4, 5}, {6, 7}};
        case Protocol::mnist5T:
            return {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}};
        case Protocol::mnist2T:
            return {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}};
    }
    return {};
}

TaskStream make_incremental_stream(const ImageDataset& dataset, Protocol protocol,
                                   const Subsample& subsample) {
    TaskStream stream;
    stream.name = std::string(to_string(protocol));
    stream.input_dim = dataset.train_x.cols();
    const auto groups = protocol_classes(protocol);
    for (std::size_t t = 0; t < groups.size(); ++t) {
        const auto& classes = groups[t];
        const std::string name = "task" + std::to_string(t + 1) + "{" + class_list(classes) + "}";
        Task task;
        task.train = take(dataset.train_x, dataset.train_y,
                          select_rows(dataset.train_y, classes, subsample.train_fraction,
                                      subsample.seed, "subsample-train"),
                          classes, name);
        task.test = take(dataset.test_x, dataset.test_y,
                         select_rows(dataset.test_y, classes, subsample.test_fraction,
                                     subsample.seed, "subsample-test"),
                         classes, name);
        stream.tasks.push_back(std::move(task));
    }
    stream.validate();
    return stream;
}

std::vector<std::size_t> task_permutation(std::size_t dim, std::size_t t, std::uint64_t seed) {
    std::vector<std::size_t> perm(dim);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    if (t == 0) return perm;
    Rng rng = make_rng(seed, "permutation", t);
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

nn::Matrix permute_columns(const nn::Matrix& x, const std::vector<std::size_t>& perm) {
    if (perm.size() != x.cols()) throw DimensionError("permute_columns: permutation size mismatch");
    nn::Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto src = x.row(r);
        auto dst = out.row(r);
        for (std::size_t c = 0; c < perm.size(); ++c) dst[c] = src[perm[c]];
    }
    return out;
}

TaskStream make_permuted_stream(const ImageDataset& dataset, std::size_t num_tasks,
                                std::uint64_t seed, const Subsample& subsample) {
    if (num_tasks == 0 || 2 * num_tasks > 10) {
        throw ArgumentError("permuted stream supports 1..5 tasks");
    }
    TaskStream stream;
    stream.name = "pmnist" + std::to_string(num_tasks) + "T";
    stream.input_dim = dataset.train_x.cols();
    // One subsample shared by all tasks: every task reuses the same images.
    for (std::size_t t = 0; t < num_tasks; ++t) {
        std::vector<int> classes(2 * (t + 1));
        std::iota(classes.begin(), classes.end(), 0);
        const auto perm = task_permutation(stream.input_dim, t, seed);
        const std::string name = "task" + std::to_string(t + 1) + "{0-" +
                                 std::to_string(classes.back()) + (t ? ",permuted}" : "}");
        Task task;
        task.train = take(dataset.train_x, dataset.train_y,
                          select_rows(dataset.train_y, classes, subsample.train_fraction,
                                      subsample.seed, "subsample-train"),
                          classes, name);
        task.test = take(dataset.test_x, dataset.test_y,
                         select_rows(dataset.test_y, classes, subsample.test_fraction,
                                     subsample.seed, "subsample-test"),
                         classes, name);
        if (t > 0) {
            task.train.x = permute_columns(task.train.x, perm);
            task.test.x = permute_columns(task.test.x, perm);
        }
        stream.tasks.push_back(std::move(task));
    }
    stream.validate();
    return stream;
}

namespace {

TaskDataset draw_blobs(const BlobTask& task, std::size_t dim, bool train, Rng& rng,
                       std::string name) {
    std::size_t total = 0;
    for (const auto& c : task.classes) total += train ? c.n_train : c.n_test;
    TaskDataset d;
    d.x = nn::Matrix(total, dim);
    d.labels.reserve(total);
    std::size_t r = 0;
    for (const auto& c : task.classes) {
        if (c.mean.size() != dim) throw ArgumentError("blob mean dimension mismatch");
        gmm::Component comp;
        comp.mean = c.mean;
        nn::Matrix cov = c.covariance;
        if (cov.empty()) {
            cov = nn::Matrix(dim, dim);
            for (std::size_t i = 0; i < dim; ++i) cov(i, i) = 1.0;
        }
        auto l = gmm::cholesky(cov);
        if (!l) throw ArgumentError("blob covariance is not positive definite");
        comp.cholesky = std::move(*l);
        const std::size_t n = train ? c.n_train : c.n_test;
        const nn::Matrix pts = gmm::sample_component(comp, n, rng);
        for (std::size_t i = 0; i < n; ++i, ++r) {
            std::copy(pts.row(i).begin(), pts.row(i).end(), d.x.row(r).begin());
            d.labels.push_back(c.class_id);
        }
        d.class_set.push_back(c.class_id);
    }
    std::sort(d.class_set.begin(), d.class_set.end());
    d.name = std::move(name);
    return d;
}

}  // namespace

TaskStream make_blob_stream(const BlobStreamSpec& spec, std::uint64_t seed) {
    TaskStream stream;
    stream.name = spec.name;
    stream.input_dim = spec.dim;
    for (std::size_t t = 0; t < spec.tasks.size(); ++t) {
        std::vector<int> ids;
        for (const auto& c : spec.tasks[t].classes) ids.push_back(c.class_id);
        const std::string name = "task" + std::to_string(t + 1) + "{" + class_list(ids) + "}";
        Rng train_rng = make_rng(seed, "blobs-train", t);
        Rng test_rng = make_rng(seed, "blobs-test", t);
        Task task;
        task.train = draw_blobs(spec.tasks[t], spec.dim, true, train_rng, name);
        task.test = draw_blobs(spec.tasks[t], spec.dim, false, test_rng, name);
        stream.tasks.push_back(std::move(task));
    }
    stream.validate();
    return stream;
}

namespace {

BlobClass blob2d(int class_id, double x, double y) {
    BlobClass c;
    c.class_id = class_id;
    c.mean = {x, y};
    return c;
}

}  // namespace

BlobStreamSpec blobs_two_task() {
    BlobStreamSpec s{"blobs2T", 2, {}};
    s.tasks.push_back({{blob2d(0, 3.0, 0.0), blob2d(1, -3.0, 0.0)}});
    s.tasks.push_back({{blob2d(2, 0.0, 6.0), blob2d(3, 0.0, -6.0)}});
    return s;
}

BlobStreamSpec blobs_three_task() {
    BlobStreamSpec s{"blobs3T", 2, {}};
    for (int t = 0; t < 3; ++t) {
        BlobTask task;
        for (int k = 0; k < 2; ++k) {
            const int cls = 2 * t + k;
            // Opposite points first so each task is a balanced binary problem.
            const double angle = std::numbers::pi * (t / 3.0 + k);
            task.classes.push_back(blob2d(cls, 6.0 * std::cos(angle), 6.0 * std::sin(angle)));
        }
        s.tasks.push_back(std::move(task));
    }
    return s;
}

BlobStreamSpec blobs_drift() {
    BlobStreamSpec s{"blobs-drift", 2, {}};
    s.tasks.push_back({{blob2d(0, 3.0, 0.0), blob2d(1, -3.0, 0.0)}});
    s.tasks.push_back({{blob2d(0, 4.0, 0.0), blob2d(2, 0.0, 5.0)}});
    return s;
}

}  // namespace icla::data
