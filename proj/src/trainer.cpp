#include "icla/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "icla/errors.hpp"
#include "icla/losses.hpp"

namespace icla::train {

Strategy parse_strategy(std::string_view name) {
    if (name == "icla") return Strategy::icla;
    if (name == "fr") return Strategy::fr;
    if (name == "mb") return Strategy::mb;
    if (name == "naive") return Strategy::naive;
    throw ArgumentError("unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::icla: return "icla";
        case Strategy::fr: return "fr";
        case Strategy::mb: return "mb";
        case Strategy::naive: return "naive";
    }
    return "icla";
}

void IclaConfig::validate() const {
    if (!(gamma >= 0.0)) throw ArgumentError("gamma must be >= 0");
    if (!(lambda >= 0.0)) throw ArgumentError("lambda must be >= 0");
    if (!(tau >= 0.0 && tau < 1.0)) throw ArgumentError("tau must lie in [0, 1)");
    if (epochs_per_task == 0) throw ArgumentError("epochs_per_task must be >= 1");
    if (batch_size < 2) throw ArgumentError("batch_size must be >= 2");
    if (swd.num_projections == 0) throw ArgumentError("swd projections must be >= 1");
    if (max_attempts_factor == 0) throw ArgumentError("max_attempts_factor must be >= 1");
    if (!(adam.lr > 0.0)) throw ArgumentError("learning rate must be positive");
}

const CurveRow& LearningCurve::end_of_task(std::size_t t) const {
    const CurveRow* last = nullptr;
    for (const auto& r : rows) {
        if (r.task == t) last = &r;
    }
    if (!last) throw ArgumentError("learning curve has no rows for task " + std::to_string(t));
    return *last;
}

namespace {

using EmbedTerm = std::function<double(const Matrix& z, Matrix& dz)>;

// One supervised pass over a labeled batch; gradients accumulate into `grads`.
// `embed_term`, when set, adds a loss on the embeddings and its gradient.
void combined_pass(const model::NetworkParams& p, const Matrix& x, std::span<const int> labels,
                   double gamma, LossResult& out, const EmbedTerm& embed_term = {}) {
    const nn::ForwardCache enc = nn::forward(p.encoder, x);
    const Matrix& z = enc.output();
    const auto head = std::span(&p.head, 1);
    const nn::ForwardCache hc = nn::forward(head, z);
    const nn::LossGrad ce = nn::cross_entropy(hc.output(), nn::onehot(labels, p.num_classes()));
    nn::BackwardResult hb = nn::backward(head, hc, ce.grad, true);
    out.grads.head.add(hb.grads[0]);
    Matrix dz = std::move(hb.input_grad);
    out.classification += ce.loss;
    out.loss += ce.loss;

    if (gamma != 0.0) {
        const nn::ForwardCache dc = nn::forward(p.decoder, z);
        nn::LossGrad rec = nn::l2_reconstruction(dc.output(), x);
        for (double& g : rec.grad.values()) g *= gamma;
        const nn::BackwardResult db = nn::backward(p.decoder, dc, rec.grad, true);
        for (std::size_t i = 0; i < db.grads.size(); ++i) out.grads.decoder[i].add(db.grads[i]);
        auto d = dz.values();
        auto e = db.input_grad.values();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += e[i];
        out.reconstruction += rec.loss;
        out.loss += gamma * rec.loss;
    }
    if (embed_term) {
        Matrix extra(z.rows(), z.cols());
        out.loss += embed_term(z, extra);
        auto d = dz.values();
        auto e = extra.values();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += e[i];
    }
    const nn::BackwardResult eb = nn::backward(p.encoder, enc, dz, false);
    for (std::size_t i = 0; i < eb.grads.size(); ++i) out.grads.encoder[i].add(eb.grads[i]);
}

void require_finite(const LossResult& r) {
    if (!std::isfinite(r.loss)) throw NumericError("non-finite loss");
}

}  // namespace

LossResult supervised_loss(const model::NetworkParams& params, const Matrix& x,
                           std::span<const int> labels, double gamma) {
    if (x.rows() != labels.size()) throw DimensionError("supervised_loss: label count mismatch");
    LossResult out{0.0, 0.0, 0.0, 0.0, model::NetworkGrads::zeros_like(params), {}};
    combined_pass(params, x, labels, gamma, out);
    require_finite(out);
    return out;
}

LossResult rehearsal_loss(const model::NetworkParams& params, const Batch& current,
                          const Batch& pseudo, std::span<const int> shared_classes, double gamma,
                          double lambda, const Matrix& directions) {
    if (current.x.rows() != current.labels.size() || pseudo.x.rows() != pseudo.labels.size()) {
        throw DimensionError("rehearsal_loss: label count mismatch");
    }
    LossResult out{0.0, 0.0, 0.0, 0.0, model::NetworkGrads::zeros_like(params), {}};

    if (lambda != 0.0) {
        const std::set<int> in_cur(current.labels.begin(), current.labels.end());
        const std::set<int> in_pse(pseudo.labels.begin(), pseudo.labels.end());
        for (int c : shared_classes) {
            if (in_cur.contains(c) && in_pse.contains(c)) out.aligned_classes.push_back(c);
        }
    }
    EmbedTerm align;
    if (!out.aligned_classes.empty()) {
        if (pseudo.embeddings.rows() != pseudo.labels.size()) {
            throw DimensionError("rehearsal_loss: pseudo batch lacks its GMM embeddings");
        }
        align = [&](const Matrix& z, Matrix& dz) {
            const swd::SwdResult r = swd::class_conditional_swd(
                EmbeddingBatch{z, current.labels}, EmbeddingBatch{pseudo.embeddings, pseudo.labels},
                out.aligned_classes, directions);
            auto d = dz.values();
            auto g = r.grad.values();
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = lambda * g[i];
            out.alignment = r.value;
            return lambda * r.value;
        };
    }
    combined_pass(params, current.x, current.labels, gamma, out, align);
    if (pseudo.x.rows() > 0) combined_pass(params, pseudo.x, pseudo.labels, gamma, out);
    require_finite(out);
    return out;
}

double accuracy(const model::NetworkParams& params, const TaskDataset& data) {
    if (data.size() == 0) return std::numeric_limits<double>::quiet_NaN();
    const auto pred = model::argmax_rows(model::logits(params, model::encode(params, data.x)));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == data.labels[i];
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

EmbeddingBatch embed(const model::NetworkParams& params, const TaskDataset& data) {
    return EmbeddingBatch{model::encode(params, data.x), data.labels};
}

std::size_t default_pseudo_per_class(const TaskDataset& task) {
    std::size_t smallest = std::numeric_limits<std::size_t>::max();
    for (int c : task.class_set) {
        smallest = std::min(smallest, rows_of_class(task.labels, c).size());
    }
    return std::max<std::size_t>(1, std::min<std::size_t>(1000, smallest));
}

namespace {

Batch make_batch(const TaskDataset& d, std::span<const std::size_t> rows,
                 const Matrix* embeddings = nullptr) {
    Batch b;
    b.x = nn::gather_rows(d.x, rows);
    b.labels.reserve(rows.size());
    for (std::size_t r : rows) b.labels.push_back(d.labels[r]);
    if (embeddings) b.embeddings = nn::gather_rows(*embeddings, rows);
    return b;
}

// Cycles through a shuffled index set, reshuffling each time it is exhausted.
class CyclicSampler {
public:
    CyclicSampler(std::size_t n, Rng& rng) : rng_(rng), order_(n) {
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::shuffle(order_.begin(), order_.end(), rng_);
    }
    std::vector<std::size_t> next(std::size_t count) {
        std::vector<std::size_t> out;
        out.reserve(count);
        while (out.size() < count) {
            if (pos_ == order_.size()) {
                std::shuffle(order_.begin(), order_.end(), rng_);
                pos_ = 0;
            }
            out.push_back(order_[pos_++]);
        }
        return out;
    }

private:
    Rng& rng_;
    std::vector<std::size_t> order_;
    std::size_t pos_ = 0;
};

CurveRow evaluate(const model::NetworkParams& params, const TaskStream& stream, std::size_t t,
                  std::size_t epoch) {
    CurveRow row;
    row.task = t + 1;
    row.epoch = epoch;
    row.task_accuracy.assign(stream.size(), std::numeric_limits<double>::quiet_NaN());
    double correct = 0.0;
    double total = 0.0;
    for (std::size_t s = 0; s <= t; ++s) {
        const TaskDataset& test = stream.tasks[s].test;
        const double acc = accuracy(params, test);
        row.task_accuracy[s] = acc;
        if (test.size() > 0) {
            correct += acc * static_cast<double>(test.size());
            total += static_cast<double>(test.size());
        }
    }
    row.seen_accuracy = total > 0.0 ? correct / total : std::numeric_limits<double>::quiet_NaN();
    return row;
}

// Replay material for one task under one strategy.
struct ReplaySource {
    TaskDataset data;                    // raw or decoded inputs
    Matrix embeddings;                   // GMM samples (icla only)
    std::optional<replay::PseudoDataset> pseudo;
    bool empty() const noexcept { return data.size() == 0; }
};

std::string context(std::size_t t, std::size_t epoch) {
    return "task " + std::to_string(t + 1) + " epoch " + std::to_string(epoch);
}

void train_task(TrainerState& st, const TaskStream& stream, std::size_t t,
                const IclaConfig& cfg, Strategy strategy, const ReplaySource& replay_src,
                const RunHooks& hooks) {
    const TaskDataset& train = stream.tasks[t].train;
    const std::vector<int> shared = stream.old_classes(t);
    Rng shuffle_rng = make_rng(cfg.seed, "shuffle", t);
    Rng replay_rng = make_rng(cfg.seed, "replay-order", t);
    Rng swd_rng = make_rng(cfg.seed, "swd", t);
    const std::size_t f = st.params.embedding_dim();

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::optional<CyclicSampler> replay_sampler;
    if (!replay_src.empty()) replay_sampler.emplace(replay_src.data.size(), replay_rng);

    const bool with_replay = replay_sampler.has_value();
    const std::size_t cur_per_step = with_replay ? std::max<std::size_t>(1, cfg.batch_size / 2)
                                                 : cfg.batch_size;
    const std::size_t rep_per_step = cfg.batch_size - cur_per_step;
    const bool align = strategy == Strategy::icla && with_replay && cfg.lambda > 0.0 &&
                       !shared.empty();

    auto emit = [&](std::size_t epoch) {
        CurveRow row = evaluate(st.params, stream, t, epoch);
        st.curve.rows.push_back(row);
        if (hooks.on_epoch) hooks.on_epoch(row);
    };

    emit(0);
    for (std::size_t epoch = 1; epoch <= cfg.epochs_per_task; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        std::set<int> aligned;
        try {
            for (std::size_t start = 0; start < order.size(); start += cur_per_step) {
                const std::size_t end = std::min(order.size(), start + cur_per_step);
                const auto rows = std::span(order).subspan(start, end - start);
                LossResult step;
                if (!with_replay) {
                    const Batch b = make_batch(train, rows);
                    step = supervised_loss(st.params, b.x, b.labels, cfg.gamma);
                } else {
                    const Batch cur = make_batch(train, rows);
                    const auto rep_rows = replay_sampler->next(rep_per_step);
                    const Batch rep =
                        make_batch(replay_src.data, rep_rows,
                                   replay_src.embeddings.rows() ? &replay_src.embeddings : nullptr);
                    Matrix directions;
                    if (align) directions = swd::draw_directions(cfg.swd.num_projections, f, swd_rng);
                    step = rehearsal_loss(st.params, cur, rep, align ? std::span<const int>(shared)
                                                                : std::span<const int>(),
                                    cfg.gamma, align ? cfg.lambda : 0.0, directions);
                    aligned.insert(step.aligned_classes.begin(), step.aligned_classes.end());
                }
                st.optimizer.step(st.params, step.grads);
            }
        } catch (const NumericError& e) {
            throw NumericError(context(t, epoch) + ": " + e.what());
        }
        if (align) {
            for (int c : shared) {
                if (!aligned.contains(c)) {
                    throw AlignmentError(context(t, epoch) + ": shared class " + std::to_string(c) +
                                             " never aligned during the epoch",
                                         c);
                }
            }
        }
        emit(epoch);
    }
}

}  // namespace

RunResult run_strategy(const TaskStream& stream, const IclaConfig& cfg,
                       const model::Architecture& arch, Strategy strategy, const RunHooks& hooks) {
    cfg.validate();
    stream.validate();
    if (arch.input_dim != stream.input_dim) {
        throw DimensionError("architecture input " + std::to_string(arch.input_dim) +
                             " does not match stream input " + std::to_string(stream.input_dim));
    }

    RunResult result;
    TrainerState& st = result.state;
    if (hooks.resume_from) {
        st = *hooks.resume_from;
        if (st.gmm) result.gmm_history.push_back(*st.gmm);
    } else {
        Rng init_rng = make_rng(cfg.seed, "init");
        st.params = model::NetworkParams::init(arch, stream.new_classes(0).size(), init_rng);
        st.optimizer = model::NetworkOptimizer::for_params(st.params, cfg.adam);
        st.buffer = replay::ReplayBuffer(cfg.buffer_capacity);
        st.curve.num_tasks = stream.size();
    }

    for (std::size_t t = st.next_task; t < stream.size(); ++t) {
        const TaskDataset& train = stream.tasks[t].train;
        ReplaySource src;
        if (t > 0) {
            switch (strategy) {
                case Strategy::icla: {
                    if (!st.gmm) throw EstimationError("icla: no internal distribution to replay", -1);
                    replay::PseudoOptions opts;
                    opts.per_class = cfg.pseudo_per_class ? cfg.pseudo_per_class
                                                          : default_pseudo_per_class(train);
                    opts.tau = cfg.tau;
                    opts.max_attempts = cfg.max_attempts_factor * opts.per_class;
                    opts.require_argmax = cfg.require_argmax;
                    try {
                        src.pseudo = replay::generate_pseudo(*st.gmm, st.params, opts,
                                                             derive_seed(cfg.seed, "pseudo", t));
                    } catch (const ReplayStarvation& e) {
                        throw ReplayStarvation(e.class_id(), e.acceptance_rate(),
                                               "task " + std::to_string(t + 1));
                    }
                    st.last_acceptance = src.pseudo->acceptance;
                    src.data = src.pseudo->as_task();
                    src.embeddings = src.pseudo->embeddings;
                    break;
                }
                case Strategy::fr: {
                    std::vector<TaskDataset> past;
                    for (std::size_t s = 0; s < t; ++s) past.push_back(stream.tasks[s].train);
                    src.data = replay::full_replay_store(past);
                    break;
                }
                case Strategy::mb:
                    src.data = st.buffer.contents();
                    break;
                case Strategy::naive:
                    break;
            }
        }

        // Pseudo samples are scored by the classifier learned so far, so the
        // head grows only after replay material exists.
        if (t > 0) {
            const std::size_t k_new = stream.new_classes(t).size();
            Rng head_rng = make_rng(cfg.seed, "head", t);
            model::expand_head(st.params, k_new, head_rng);
            model::expand_head(st.optimizer, k_new);
        }

        train_task(st, stream, t, cfg, strategy, src, hooks);

        if (strategy == Strategy::icla) {
            const EmbeddingBatch current = embed(st.params, train);
            if (t == 0) {
                st.gmm = gmm::fit_map(current, cfg.gmm);
            } else {
                const EmbeddingBatch pseudo_z = embed(st.params, src.data);
                const auto known = stream.seen_classes(t - 1);
                st.gmm = gmm::update_distribution(current, pseudo_z, known, cfg.gmm);
            }
            result.gmm_history.push_back(*st.gmm);
        } else if (strategy == Strategy::mb) {
            Rng buffer_rng = make_rng(cfg.seed, "buffer", t);
            st.buffer.update(train, buffer_rng);
        }
        st.next_task = t + 1;
        if (hooks.on_task_end) hooks.on_task_end(st);
    }
    return result;
}

RunResult run_icla(const TaskStream& stream, const IclaConfig& config,
                   const model::Architecture& arch, const RunHooks& hooks) {
    return run_strategy(stream, config, arch, Strategy::icla, hooks);
}

RunResult run_baseline(const TaskStream& stream, const IclaConfig& config,
                       const model::Architecture& arch, Strategy strategy,
                       const RunHooks& hooks) {
    if (strategy == Strategy::icla) throw ArgumentError("run_baseline: icla is not a baseline");
    return run_strategy(stream, config, arch, strategy, hooks);
}

}  // namespace icla::train
