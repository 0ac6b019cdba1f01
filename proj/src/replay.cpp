#include "icla/replay.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "icla/errors.hpp"

namespace icla::replay {

TaskDataset PseudoDataset::as_task() const {
    TaskDataset d;
    d.x = inputs;
    d.labels = labels;
    d.class_set = sorted_classes(labels);
    d.name = "pseudo";
    return d;
}

EmbeddingBatch PseudoDataset::as_embeddings() const { return EmbeddingBatch{embeddings, labels}; }

namespace {

struct ClassDraw {
    Matrix inputs;
    Matrix embeddings;
    ClassAcceptance stats;
};

ClassDraw draw_class(const gmm::Component& component, const model::NetworkParams& params,
                     const PseudoOptions& options, Rng& rng) {
    const std::size_t f = component.mean.size();
    const std::size_t d = params.input_dim();
    const std::size_t want = options.per_class;
    std::vector<double> in_rows;
    std::vector<double> z_rows;
    ClassDraw out;
    out.stats.class_id = component.class_id;
    while (out.stats.accepted < want && out.stats.attempts < options.max_attempts) {
        const std::size_t remaining = want - out.stats.accepted;
        const std::size_t chunk = std::min(options.max_attempts - out.stats.attempts,
                                           std::max<std::size_t>(2 * remaining, 64));
        const Matrix z = gmm::sample_component(component, chunk, rng);
        const Matrix x = model::decode(params, z);
        const Matrix probs = model::classify(params, model::encode(params, x));
        for (std::size_t i = 0; i < chunk && out.stats.accepted < want; ++i) {
            ++out.stats.attempts;
            auto p = probs.row(i);
            const auto best = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
            const double confidence = p[static_cast<std::size_t>(component.class_id)];
            const bool agrees = !options.require_argmax || best == component.class_id;
            if (agrees && confidence >= options.tau) {
                in_rows.insert(in_rows.end(), x.row(i).begin(), x.row(i).end());
                z_rows.insert(z_rows.end(), z.row(i).begin(), z.row(i).end());
                ++out.stats.accepted;
            }
        }
    }
    out.inputs = Matrix(out.stats.accepted, d, std::move(in_rows));
    out.embeddings = Matrix(out.stats.accepted, f, std::move(z_rows));
    return out;
}

}  // namespace

PseudoDataset generate_pseudo(const gmm::GaussianMixture& gmm, const model::NetworkParams& params,
                              const PseudoOptions& options, std::uint64_t seed) {
    if (options.per_class == 0) throw ArgumentError("generate_pseudo: per_class must be >= 1");
    if (!(options.tau >= 0.0 && options.tau < 1.0)) {
        throw ArgumentError("generate_pseudo: tau must lie in [0, 1)");
    }
    if (gmm.dim != params.embedding_dim()) {
        throw DimensionError("generate_pseudo: GMM dimension does not match the embedding");
    }
    const std::size_t n = options.per_class * gmm.size();
    PseudoDataset out{Matrix(n, params.input_dim()), {}, Matrix(n, gmm.dim), {}};
    out.labels.reserve(n);
    std::size_t r = 0;
    for (const auto& comp : gmm.components) {
        if (comp.class_id < 0 || static_cast<std::size_t>(comp.class_id) >= params.num_classes()) {
            throw ArgumentError("generate_pseudo: class " + std::to_string(comp.class_id) +
                                " has no classifier output");
        }
        Rng rng = make_rng(seed, "pseudo", static_cast<std::uint64_t>(comp.class_id));
        ClassDraw draw = draw_class(comp, params, options, rng);
        out.acceptance.push_back(draw.stats);
        if (draw.stats.accepted == 0) {
            throw ReplayStarvation(comp.class_id, draw.stats.rate());
        }
        for (std::size_t i = 0; i < options.per_class; ++i, ++r) {
            const std::size_t src = i % draw.stats.accepted;
            std::copy(draw.inputs.row(src).begin(), draw.inputs.row(src).end(),
                      out.inputs.row(r).begin());
            std::copy(draw.embeddings.row(src).begin(), draw.embeddings.row(src).end(),
                      out.embeddings.row(r).begin());
            out.labels.push_back(comp.class_id);
        }
    }
    return out;
}

std::size_t ReplayBuffer::size() const noexcept {
    std::size_t n = 0;
    for (const auto& [cls, rows] : store_) n += rows.rows();
    return n;
}

std::size_t ReplayBuffer::count(int class_id) const noexcept {
    auto it = store_.find(class_id);
    return it == store_.end() ? 0 : it->second.rows();
}

namespace {

// `keep` rows of `m` chosen uniformly without replacement, original order kept.
Matrix choose_rows(const Matrix& m, std::size_t keep, Rng& rng) {
    if (keep >= m.rows()) return m;
    std::vector<std::size_t> idx(m.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());
    return nn::gather_rows(m, idx);
}

}  // namespace

void ReplayBuffer::update(const TaskDataset& task, Rng& rng) {
    std::vector<int> seen;
    for (const auto& [cls, rows] : store_) seen.push_back(cls);
    for (int c : task.class_set) {
        if (!store_.contains(c)) seen.push_back(c);
    }
    if (seen.empty()) return;
    const std::size_t quota = capacity_ / seen.size();
    if (quota == 0) {
        throw ArgumentError("buffer_update: capacity " + std::to_string(capacity_) +
                            " is smaller than the " + std::to_string(seen.size()) +
                            " classes seen");
    }
    std::map<int, Matrix> next;
    for (int c : seen) {
        Matrix pool = store_.contains(c) ? store_.at(c) : Matrix(0, task.x.cols());
        if (std::binary_search(task.class_set.begin(), task.class_set.end(), c)) {
            pool = nn::vstack(pool, nn::gather_rows(task.x, rows_of_class(task.labels, c)));
        }
        next[c] = choose_rows(pool, quota, rng);
    }
    store_ = std::move(next);
}

TaskDataset ReplayBuffer::contents() const {
    TaskDataset d;
    d.name = "buffer";
    for (const auto& [cls, rows] : store_) {
        d.x = nn::vstack(d.x, rows);
        d.labels.insert(d.labels.end(), rows.rows(), cls);
        if (rows.rows() > 0) d.class_set.push_back(cls);
    }
    return d;
}

ReplayBuffer ReplayBuffer::from_parts(std::size_t capacity, std::map<int, Matrix> store) {
    ReplayBuffer b(capacity);
    b.store_ = std::move(store);
    return b;
}

TaskDataset full_replay_store(std::span<const TaskDataset> past_tasks) {
    TaskDataset out;
    for (const auto& t : past_tasks) out = concat(out, t);
    out.name = "full-replay";
    return out;
}

}  // namespace icla::replay
