#include "icla/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "icla/checkpoint.hpp"
#include "icla/curve_io.hpp"
#include "icla/datasets.hpp"
#include "icla/embedding.hpp"
#include "icla/errors.hpp"
#include "icla/swd.hpp"

namespace icla::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_blobs(const std::string& protocol) { return protocol.rfind("blobs", 0) == 0; }

data::ImageDataset load_images(const ExperimentConfig& cfg, const std::string& name) {
    const auto dir = data::locate_dataset(name, cfg.data_dir);
    if (!dir) {
        throw DataError(name + " IDX files not found; set data_dir or ICLA_DATA_DIR "
                               "(tools/fetch_mnist.sh downloads MNIST)");
    }
    return data::load_image_dataset(*dir);
}

std::string seed_tag(std::uint64_t seed) { return "seed" + std::to_string(seed); }

void write_text(const fs::path& path, const std::string& text) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp);
        out << text;
    }
    fs::rename(tmp, path);
}

// Timing rows of tasks already finished, so a resumed run keeps them.
std::string kept_timing(const fs::path& path, std::size_t tasks_done, double& last_seconds) {
    std::ifstream in(path);
    std::string line, kept;
    last_seconds = 0.0;
    if (!std::getline(in, line)) return kept;
    while (std::getline(in, line)) {
        std::istringstream s(line);
        std::size_t task = 0, epoch = 0;
        char comma = 0;
        double secs = 0.0;
        if (!(s >> task >> comma >> epoch >> comma >> secs)) continue;
        if (task > tasks_done) break;
        kept += line + '\n';
        last_seconds = secs;
    }
    return kept;
}

class SeedRunner {
public:
    SeedRunner(const ExperimentConfig& cfg, const TaskStream& stream, const fs::path& dir,
               std::uint64_t seed, const RunOptions& options, std::mutex& log_mutex)
        : cfg_(cfg), stream_(stream), dir_(dir), seed_(seed), options_(options),
          log_mutex_(log_mutex) {}

    SeedOutcome run() {
        SeedOutcome outcome;
        outcome.seed = seed_;
        try {
            outcome.curve = train();
        } catch (const std::exception& e) {
            outcome.exit_code = exit_code_for(e);
            outcome.error = e.what();
            log("seed " + std::to_string(seed_) + " failed: " + e.what());
        }
        return outcome;
    }

private:
    train::LearningCurve train() {
        const auto strategy = train::parse_strategy(cfg_.strategy);
        const auto tcfg = trainer_config(cfg_, seed_);
        const auto arch = architecture_for(cfg_, stream_);
        fs::create_directories(dir_ / seed_tag(seed_));

        std::optional<train::TrainerState> resumed;
        if (options_.resume && fs::exists(state_path(dir_, seed_))) {
            resumed = io::load_state(state_path(dir_, seed_));
            log("seed " + std::to_string(seed_) + " resuming at task " +
                std::to_string(resumed->next_task + 1));
        }

        curve_.open(curve_path(dir_, seed_), std::ios::trunc);
        timing_text_ = resumed ? kept_timing(timing_path(dir_, seed_), resumed->next_task,
                                             time_offset_)
                               : std::string();
        timing_.open(timing_path(dir_, seed_), std::ios::trunc);
        if (!curve_ || !timing_) throw DataError("cannot write curve files under " + dir_.string());
        curve_ << curve_header(stream_.size()) << '\n';
        timing_ << "task,epoch,wall_seconds\n" << timing_text_;
        if (resumed) {
            for (const auto& row : resumed->curve.rows) curve_ << curve_line(row) << '\n';
            if (resumed->next_task >= stream_.size()) return resumed->curve;
        }
        curve_.flush();
        timing_.flush();
        start_ = std::chrono::steady_clock::now();

        train::RunHooks hooks;
        hooks.resume_from = resumed ? &*resumed : nullptr;
        hooks.on_epoch = [&](const train::CurveRow& row) { on_epoch(row); };
        hooks.on_task_end = [&](const train::TrainerState& st) { on_task_end(st); };
        auto result = train::run_strategy(stream_, tcfg, arch, strategy, hooks);
        return result.state.curve;
    }

    void on_epoch(const train::CurveRow& row) {
        const double secs =
            time_offset_ +
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        curve_ << curve_line(row) << '\n';
        curve_.flush();
        timing_ << row.task << ',' << row.epoch << ',' << format_double(secs) << '\n';
        timing_.flush();
        char buf[128];
        std::snprintf(buf, sizeof buf, "seed %llu task %zu epoch %zu seen %.4f (%.1fs)",
                      static_cast<unsigned long long>(seed_), row.task, row.epoch,
                      row.seen_accuracy, secs);
        log(buf);
    }

    void on_task_end(const train::TrainerState& st) {
        const std::size_t task = st.next_task;
        if (cfg_.keep_snapshots) {
            io::save_params(params_snapshot_path(dir_, seed_, task), st.params);
            if (st.gmm) {
                io::save_gmm(gmm_snapshot_path(dir_, seed_, task), *st.gmm);
            } else {
                gmm::FitOptions fit;
                fit.ridge = cfg_.ridge;
                fit.max_ridge = cfg_.max_ridge;
                fit.mode = cfg_.covariance == "diagonal" ? gmm::CovarianceMode::diagonal
                                                         : gmm::CovarianceMode::full;
                try {
                    io::save_gmm(gmm_snapshot_path(dir_, seed_, task),
                                 diagnostic_mixture(st.params, stream_, task, fit));
                } catch (const EstimationError& e) {
                    log("seed " + std::to_string(seed_) + " task " + std::to_string(task) +
                        ": no diagnostic mixture (" + e.what() + ")");
                }
            }
        }
        io::save_state(state_path(dir_, seed_), st);
    }

    void log(const std::string& msg) {
        if (!options_.log) return;
        std::lock_guard lock(log_mutex_);
        *options_.log << msg << '\n';
        options_.log->flush();
    }

    const ExperimentConfig& cfg_;
    const TaskStream& stream_;
    fs::path dir_;
    std::uint64_t seed_;
    const RunOptions& options_;
    std::mutex& log_mutex_;
    std::ofstream curve_;
    std::ofstream timing_;
    std::string timing_text_;
    double time_offset_ = 0.0;
    std::chrono::steady_clock::time_point start_;
};

json manifest(const ExperimentConfig& cfg, const std::vector<SeedOutcome>& outcomes,
              const std::string& status, bool has_aggregate) {
    json j;
    j["schema_version"] = kCurveSchemaVersion;
    j["config_hash"] = config_hash(cfg);
    j["protocol"] = cfg.protocol;
    j["strategy"] = cfg.strategy;
    j["status"] = status;
    j["seeds"] = json::array();
    for (const auto& o : outcomes) {
        j["seeds"].push_back({{"seed", o.seed},
                              {"status", o.exit_code == exit_ok ? "complete" : "failed"},
                              {"exit_code", o.exit_code},
                              {"error", o.error},
                              {"curve", curve_path({}, o.seed).string()},
                              {"timing", timing_path({}, o.seed).string()}});
    }
    j["aggregate"] = has_aggregate ? json("aggregate.csv") : json(nullptr);
    return j;
}

std::vector<std::size_t> class_counts(const EmbeddingBatch& batch, std::span<const int> classes) {
    std::vector<std::size_t> counts;
    for (int c : classes) counts.push_back(rows_of_class(batch.labels, c).size());
    return counts;
}

// Draws counts[i] points from the component of classes[i].
nn::Matrix sample_restricted(const gmm::GaussianMixture& mix, std::span<const int> classes,
                             std::span<const std::size_t> counts, Rng& rng) {
    nn::Matrix out;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const gmm::Component* comp = mix.find(classes[i]);
        if (!comp) {
            throw AuditError("mixture snapshot has no component for class " +
                             std::to_string(classes[i]));
        }
        out = nn::vstack(out, gmm::sample_component(*comp, counts[i], rng));
    }
    return out;
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ArgumentError*>(&e)) {
        return exit_config;
    }
    if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const ParseError*>(&e)) return exit_data;
    if (dynamic_cast<const NumericError*>(&e)) return exit_divergence;
    if (dynamic_cast<const ReplayStarvation*>(&e)) return exit_starvation;
    return exit_failure;
}

TaskStream build_stream(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto& p = cfg.protocol;
    if (p == "blobs2T") return data::make_blob_stream(data::blobs_two_task(), cfg.data_seed);
    if (p == "blobs3T") return data::make_blob_stream(data::blobs_three_task(), cfg.data_seed);
    if (p == "blobs-drift") return data::make_blob_stream(data::blobs_drift(), cfg.data_seed);
    const data::Subsample sub{cfg.train_fraction, cfg.test_fraction, cfg.data_seed};
    if (p == "pmnist") {
        return data::make_permuted_stream(load_images(cfg, "mnist"), cfg.permuted_tasks,
                                          cfg.data_seed, sub);
    }
    const auto protocol = data::parse_protocol(p);
    const std::string name = protocol == data::Protocol::fmnist4T ? "fashion-mnist" : "mnist";
    return data::make_incremental_stream(load_images(cfg, name), protocol, sub);
}

model::Architecture architecture_for(const ExperimentConfig& cfg, const TaskStream& stream) {
    model::Architecture arch;
    if (is_blobs(cfg.protocol)) {
        arch = {stream.input_dim, {32}, 8, nn::Activation::relu, nn::Activation::linear,
                nn::Activation::linear};
    } else if (cfg.protocol == "mnist5T" || cfg.protocol == "mnist2T") {
        arch = model::mlp_100(stream.input_dim);
    } else {
        arch = model::mlp_embedding32(stream.input_dim);
    }
    if (cfg.hidden) arch.hidden = *cfg.hidden;
    if (cfg.embedding_dim) arch.embedding_dim = *cfg.embedding_dim;
    if (cfg.hidden_activation) arch.hidden_activation = *cfg.hidden_activation;
    if (cfg.embedding_activation) arch.embedding_activation = *cfg.embedding_activation;
    if (cfg.output_activation) arch.output_activation = *cfg.output_activation;
    return arch;
}

std::size_t default_buffer_capacity(const std::string& protocol) {
    return protocol == "pmnist" ? 30000 : 100;
}

train::IclaConfig trainer_config(const ExperimentConfig& cfg, std::uint64_t seed) {
    train::IclaConfig t;
    t.gamma = cfg.gamma;
    t.lambda = cfg.lambda;
    t.tau = cfg.tau;
    t.epochs_per_task = cfg.epochs_per_task;
    t.batch_size = cfg.batch_size;
    t.adam.lr = cfg.learning_rate;
    t.swd.num_projections = cfg.swd_projections;
    t.pseudo_per_class = cfg.pseudo_per_class;
    t.max_attempts_factor = cfg.max_attempts_factor;
    t.require_argmax = cfg.require_argmax;
    t.gmm.ridge = cfg.ridge;
    t.gmm.max_ridge = cfg.max_ridge;
    t.gmm.mode = cfg.covariance == "diagonal" ? gmm::CovarianceMode::diagonal
                                              : gmm::CovarianceMode::full;
    t.buffer_capacity = cfg.buffer_capacity.value_or(default_buffer_capacity(cfg.protocol));
    t.seed = seed;
    return t;
}

std::size_t pseudo_per_class_at(const ExperimentConfig& cfg, const TaskStream& stream,
                                std::size_t t) {
    if (cfg.strategy != "icla" || t == 0) return 0;
    return cfg.pseudo_per_class ? cfg.pseudo_per_class
                                : train::default_pseudo_per_class(stream.tasks[t].train);
}

fs::path curve_path(const fs::path& dir, std::uint64_t seed) {
    return dir / ("curve_" + seed_tag(seed) + ".csv");
}

fs::path timing_path(const fs::path& dir, std::uint64_t seed) {
    return dir / ("timing_" + seed_tag(seed) + ".csv");
}

fs::path state_path(const fs::path& dir, std::uint64_t seed) {
    return dir / seed_tag(seed) / "state.bin";
}

fs::path params_snapshot_path(const fs::path& dir, std::uint64_t seed, std::size_t task) {
    return dir / seed_tag(seed) / ("task" + std::to_string(task) + ".params");
}

fs::path gmm_snapshot_path(const fs::path& dir, std::uint64_t seed, std::size_t task) {
    return dir / seed_tag(seed) / ("task" + std::to_string(task) + ".gmm");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    return run_experiment(cfg, build_stream(cfg), options);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const TaskStream& stream,
                                const RunOptions& options) {
    cfg.validate();
    stream.validate();
    ExperimentResult result;
    result.dir = experiment_dir(cfg);
    fs::create_directories(result.dir);
    save_config(result.dir / "config.json", cfg);
    write_text(result.dir / "manifest.json", manifest(cfg, {}, "running", false).dump(2) + "\n");

    std::vector<SeedOutcome> outcomes(cfg.seeds.size());
    std::mutex log_mutex;
    std::atomic<std::size_t> next{0};
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(cfg.jobs ? cfg.jobs : hw, cfg.seeds.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
                    SeedRunner runner(cfg, stream, result.dir, cfg.seeds[i], options, log_mutex);
                    outcomes[i] = runner.run();
                }
            });
        }
    }

    std::vector<train::LearningCurve> complete;
    for (const auto& o : outcomes) {
        if (o.exit_code == exit_ok) {
            complete.push_back(o.curve);
        } else if (result.exit_code == exit_ok) {
            result.exit_code = o.exit_code;
        }
    }
    if (!complete.empty()) {
        std::ostringstream agg;
        write_aggregate_csv(agg, aggregate(complete), stream.size());
        write_text(result.dir / "aggregate.csv", agg.str());
    }
    const std::string status = complete.size() == outcomes.size() ? "complete" : "partial";
    write_text(result.dir / "manifest.json",
               manifest(cfg, outcomes, status, !complete.empty()).dump(2) + "\n");
    result.seeds = std::move(outcomes);
    return result;
}

gmm::GaussianMixture diagnostic_mixture(const model::NetworkParams& params,
                                        const TaskStream& stream, std::size_t tasks_seen,
                                        const gmm::FitOptions& options) {
    EmbeddingBatch all;
    for (std::size_t t = 0; t < tasks_seen; ++t) {
        all = concat(all, train::embed(params, stream.tasks[t].train));
    }
    return gmm::fit_map(all, options);
}

EmbeddingDump dump_embeddings(const model::NetworkParams& params, const TaskStream& stream) {
    EmbeddingDump dump;
    for (std::size_t t = 0; t < stream.size(); ++t) {
        const auto& test = stream.tasks[t].test;
        dump.points = nn::vstack(dump.points, model::encode(params, test.x));
        dump.labels.insert(dump.labels.end(), test.labels.begin(), test.labels.end());
        dump.tasks.insert(dump.tasks.end(), test.labels.size(), t + 1);
    }
    return dump;
}

void write_embeddings_csv(std::ostream& out, const EmbeddingDump& dump) {
    for (std::size_t c = 0; c < dump.points.cols(); ++c) out << 'z' << c << ',';
    out << "label,task\n";
    for (std::size_t r = 0; r < dump.points.rows(); ++r) {
        for (double v : dump.points.row(r)) out << format_double(v) << ',';
        out << dump.labels[r] << ',' << dump.tasks[r] << '\n';
    }
}

ClusterSeparation cluster_separation(const EmbeddingDump& dump) {
    const std::size_t f = dump.points.cols();
    auto dist = [](std::span<const double> a, std::span<const double> b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(s);
    };
    // Centroids keyed by class, and by (class, task).
    std::map<int, std::vector<double>> centroid;
    std::map<int, std::size_t> count;
    std::map<std::pair<int, std::size_t>, std::vector<double>> task_centroid;
    std::map<std::pair<int, std::size_t>, std::size_t> task_count;
    for (std::size_t r = 0; r < dump.points.rows(); ++r) {
        const int c = dump.labels[r];
        const auto key = std::pair{c, dump.tasks[r]};
        auto& a = centroid[c];
        auto& b = task_centroid[key];
        a.resize(f, 0.0);
        b.resize(f, 0.0);
        const auto row = dump.points.row(r);
        for (std::size_t i = 0; i < f; ++i) {
            a[i] += row[i];
            b[i] += row[i];
        }
        ++count[c];
        ++task_count[key];
    }
    for (auto& [c, v] : centroid) {
        for (double& x : v) x /= static_cast<double>(count[c]);
    }
    for (auto& [k, v] : task_centroid) {
        for (double& x : v) x /= static_cast<double>(task_count[k]);
    }

    ClusterSeparation out;
    if (centroid.size() < 2) throw ArgumentError("cluster_separation needs at least two classes");
    out.min_centroid_distance = std::numeric_limits<double>::infinity();
    for (auto i = centroid.begin(); i != centroid.end(); ++i) {
        for (auto j = std::next(i); j != centroid.end(); ++j) {
            out.min_centroid_distance = std::min(out.min_centroid_distance, dist(i->second, j->second));
        }
    }
    std::map<int, double> spread;
    for (std::size_t r = 0; r < dump.points.rows(); ++r) {
        spread[dump.labels[r]] += dist(dump.points.row(r), centroid[dump.labels[r]]);
    }
    for (const auto& [c, s] : spread) out.mean_within_spread += s / static_cast<double>(count[c]);
    out.mean_within_spread /= static_cast<double>(spread.size());
    out.ratio = out.min_centroid_distance / out.mean_within_spread;

    double worst = 0.0;
    for (auto i = task_centroid.begin(); i != task_centroid.end(); ++i) {
        for (auto j = std::next(i); j != task_centroid.end() && j->first.first == i->first.first; ++j) {
            worst = std::max(worst, dist(i->second, j->second));
        }
    }
    out.task_fragmentation = worst / out.min_centroid_distance;
    return out;
}

AuditReport audit_forgetting(const TaskStream& stream, const AuditInputs& in,
                             const AuditOptions& options) {
    const std::size_t n = stream.size();
    if (in.mixtures.size() != n) {
        throw AuditError("expected " + std::to_string(n) + " mixture snapshots, got " +
                         std::to_string(in.mixtures.size()));
    }
    if (in.task_embeddings.size() != n) {
        throw AuditError("expected " + std::to_string(n) + " embedding snapshots, got " +
                         std::to_string(in.task_embeddings.size()));
    }
    if (in.curve.num_tasks != n) throw AuditError("learning curve covers a different stream");
    const std::size_t dim = in.mixtures.front().dim;
    for (const auto& m : in.mixtures) {
        if (m.dim != dim) throw AuditError("mixture snapshots disagree on the embedding dimension");
    }
    Rng dir_rng = make_rng(options.seed, "audit-directions");
    const nn::Matrix directions = swd::draw_directions(options.projections, dim, dir_rng);

    AuditReport report;
    report.num_tasks = n;
    for (std::size_t t = 1; t <= n; ++t) {
        const auto& classes = stream.tasks[t - 1].train.class_set;
        const EmbeddingBatch& emb = in.task_embeddings[t - 1];
        const auto counts = class_counts(emb, classes);

        Rng fit_rng = make_rng(options.seed, "audit-fit", t);
        const double fit =
            swd::swd2(emb.points, sample_restricted(in.mixtures[t - 1], classes, counts, fit_rng),
                      directions)
                .value;
        // drift[s] compares the mixtures after tasks s and s + 1 (1-based).
        std::vector<double> drift(n + 1, 0.0);
        for (std::size_t s = t; s + 1 <= n; ++s) {
            Rng rng = make_rng(options.seed, "audit-drift", t * (n + 1) + s);
            const auto a = sample_restricted(in.mixtures[s - 1], classes, counts, rng);
            const auto b = sample_restricted(in.mixtures[s], classes, counts, rng);
            drift[s] = swd::swd2(a, b, directions).value;
        }

        bool monotone = true, nondecreasing = true;
        double best = 2.0, prev_sum = 0.0;
        for (std::size_t horizon = t; horizon <= n; ++horizon) {
            AuditRow row;
            row.task = t;
            row.horizon = horizon;
            row.retained_accuracy = in.curve.end_of_task(horizon).task_accuracy[t - 1];
            row.error = 1.0 - row.retained_accuracy;
            row.swd_fit = fit;
            for (std::size_t s = t; s < horizon; ++s) {
                row.swd_drift_sum += drift[s];
                ++row.drift_terms;
            }
            if (horizon > t && horizon - 1 < in.pseudo_per_class.size()) {
                row.pseudo_samples = in.pseudo_per_class[horizon - 1] * classes.size();
            }
            monotone = monotone && row.retained_accuracy <= best + options.tolerance;
            best = std::min(best, row.retained_accuracy);
            nondecreasing = nondecreasing && row.swd_drift_sum >= prev_sum;
            prev_sum = row.swd_drift_sum;
            report.rows.push_back(row);
        }
        report.forgetting_monotone.push_back(monotone);
        report.drift_sum_nondecreasing.push_back(nondecreasing);
    }
    return report;
}

AuditInputs load_audit_inputs(const fs::path& dir, const ExperimentConfig& cfg,
                              const TaskStream& stream, std::uint64_t seed) {
    AuditInputs in;
    const auto curve_file = curve_path(dir, seed);
    if (!fs::exists(curve_file)) throw AuditError("missing learning curve " + curve_file.string());
    in.curve = read_curve_csv(curve_file);
    for (std::size_t t = 1; t <= stream.size(); ++t) {
        const auto pp = params_snapshot_path(dir, seed, t);
        const auto gp = gmm_snapshot_path(dir, seed, t);
        if (!fs::exists(pp)) throw AuditError("missing parameter snapshot " + pp.string());
        if (!fs::exists(gp)) throw AuditError("missing mixture snapshot " + gp.string());
        const auto params = io::load_params(pp);
        in.mixtures.push_back(io::load_gmm(gp));
        in.task_embeddings.push_back(train::embed(params, stream.tasks[t - 1].train));
        in.pseudo_per_class.push_back(pseudo_per_class_at(cfg, stream, t - 1));
    }
    try {
        for (std::size_t t = 1; t <= stream.size(); ++t) (void)in.curve.end_of_task(t);
    } catch (const ArgumentError& e) {
        throw AuditError(std::string("incomplete learning curve: ") + e.what());
    }
    return in;
}

std::string audit_header() {
    return "task,horizon,retained_accuracy,error,swd_estimate_fit,swd_estimate_drift_sum,"
           "drift_terms,pseudo_samples";
}

void write_audit_csv(std::ostream& out, const AuditReport& report) {
    out << audit_header() << '\n';
    for (const auto& r : report.rows) {
        out << r.task << ',' << r.horizon << ',' << format_double(r.retained_accuracy) << ','
            << format_double(r.error) << ',' << format_double(r.swd_fit) << ','
            << format_double(r.swd_drift_sum) << ',' << r.drift_terms << ',' << r.pseudo_samples
            << '\n';
    }
}

std::string format_audit_table(const AuditReport& report) {
    std::string s;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%4s %7s %9s %7s %14s %16s %5s %7s\n", "task", "horizon",
                  "retained", "error", "SWD est. fit", "SWD est. drift", "terms", "pseudo");
    s += buf;
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%4zu %7zu %9.4f %7.4f %14.6g %16.6g %5zu %7zu\n", r.task,
                      r.horizon, r.retained_accuracy, r.error, r.swd_fit, r.swd_drift_sum,
                      r.drift_terms, r.pseudo_samples);
        s += buf;
    }
    for (std::size_t t = 0; t < report.num_tasks; ++t) {
        std::snprintf(buf, sizeof buf, "task %zu: forgetting monotone %s, drift sum nondecreasing %s\n",
                      t + 1, report.forgetting_monotone[t] ? "yes" : "no",
                      report.drift_sum_nondecreasing[t] ? "yes" : "no");
        s += buf;
    }
    return s;
}

}  // namespace icla::harness
