// Command-line front end: run an experiment, dump test-split embeddings of a
// trained snapshot, or audit forgetting over the per-task snapshots.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "icla/checkpoint.hpp"
#include "icla/config.hpp"
#include "icla/curve_io.hpp"
#include "icla/errors.hpp"
#include "icla/harness.hpp"

namespace fs = std::filesystem;
using namespace icla;
using namespace icla::harness;
using nlohmann::json;

namespace {

// Config file plus one flag per config key. Flags win over the file.
struct ConfigSource {
    std::string config_file;
    std::string run_dir;
    std::map<std::string, std::string> overrides;

    void attach(CLI::App& app, bool with_run_dir) {
        app.add_option("-c,--config", config_file, "JSON experiment config")->check(CLI::ExistingFile);
        if (with_run_dir) {
            app.add_option("--run-dir", run_dir, "experiment directory written by `run`")
                ->check(CLI::ExistingDirectory);
        }
        for (const auto& key : config_keys()) {
            std::string names = "--" + key;
            std::string dashed = key;
            std::ranges::replace(dashed, '_', '-');
            if (dashed != key) names += ",--" + dashed;
            app.add_option_function<std::string>(
                names, [this, key](const std::string& v) { overrides[key] = v; },
                "overrides config key '" + key + "'");
        }
    }

    ExperimentConfig resolve() const {
        json j = json::object();
        if (!run_dir.empty()) {
            std::ifstream in(fs::path(run_dir) / "config.json");
            if (!in) throw ConfigError("no config.json in " + run_dir);
            j = json::parse(in, nullptr, false);
        } else if (!config_file.empty()) {
            std::ifstream in(config_file);
            j = json::parse(in, nullptr, false);
            if (j.is_discarded()) throw ConfigError(config_file + ": not valid JSON");
        }
        const json defaults = to_json(ExperimentConfig{});
        for (const auto& [key, text] : overrides) {
            const bool string_key = defaults[key].is_string() || key.ends_with("_activation");
            if (string_key) {
                j[key] = text;
                continue;
            }
            std::string src = text;
            if (key == "seeds" && !src.starts_with("[")) src = "[" + src + "]";
            json v = json::parse(src, nullptr, false);
            if (v.is_discarded()) throw ConfigError("--" + key + ": cannot parse '" + text + "'");
            j[key] = v;
        }
        return config_from_json(j);
    }

    fs::path dir(const ExperimentConfig& cfg) const {
        return run_dir.empty() ? experiment_dir(cfg) : fs::path(run_dir);
    }
};

int cmd_run(const ConfigSource& src, bool resume, bool quiet) {
    const auto cfg = src.resolve();
    RunOptions options;
    options.resume = resume;
    options.log = quiet ? nullptr : &std::cerr;
    const auto result = run_experiment(cfg, options);
    std::cout << result.dir.string() << '\n';
    for (const auto& s : result.seeds) {
        if (s.exit_code == exit_ok) {
            std::printf("seed %llu: final seen accuracy %.4f\n",
                        static_cast<unsigned long long>(s.seed),
                        s.curve.rows.empty() ? 0.0 : s.curve.rows.back().seen_accuracy);
        } else {
            std::printf("seed %llu: failed (exit %d): %s\n", static_cast<unsigned long long>(s.seed),
                        s.exit_code, s.error.c_str());
        }
    }
    return result.exit_code;
}

int cmd_dump(const ConfigSource& src, std::optional<std::uint64_t> seed,
             std::optional<std::size_t> task, const std::string& out_path) {
    const auto cfg = src.resolve();
    const auto dir = src.dir(cfg);
    const auto stream = build_stream(cfg);
    const std::uint64_t s = seed.value_or(cfg.seeds.front());
    const std::size_t t = task.value_or(stream.size());
    if (t == 0 || t > stream.size()) throw ConfigError("--task must lie in 1.." + std::to_string(stream.size()));
    const auto snapshot = params_snapshot_path(dir, s, t);
    if (!fs::exists(snapshot)) throw DataError("missing parameter snapshot " + snapshot.string());
    const auto dump = dump_embeddings(io::load_params(snapshot), stream);
    const fs::path out = out_path.empty()
                             ? dir / ("embeddings_seed" + std::to_string(s) + "_task" +
                                      std::to_string(t) + ".csv")
                             : fs::path(out_path);
    std::ofstream file(out);
    if (!file) throw DataError("cannot write " + out.string());
    write_embeddings_csv(file, dump);
    const auto sep = cluster_separation(dump);
    std::printf("%s\n%zu rows x %zu coordinates\n", out.string().c_str(), dump.points.rows(),
                dump.points.cols());
    std::printf("min centroid distance %.4g, mean within-class spread %.4g, ratio %.3g (%s)\n",
                sep.min_centroid_distance, sep.mean_within_spread, sep.ratio,
                sep.separated() ? "separated" : "not separated");
    std::printf("largest same-class centroid shift across tasks: %.3g of min centroid distance\n",
                sep.task_fragmentation);
    return exit_ok;
}

int cmd_audit(const ConfigSource& src, std::optional<std::uint64_t> seed, std::size_t projections) {
    const auto cfg = src.resolve();
    const auto dir = src.dir(cfg);
    const auto stream = build_stream(cfg);
    std::vector<std::uint64_t> seeds = seed ? std::vector{*seed} : cfg.seeds;
    for (const auto s : seeds) {
        AuditOptions opts;
        opts.projections = projections;
        opts.seed = s;
        const auto report = audit_forgetting(stream, load_audit_inputs(dir, cfg, stream, s), opts);
        const auto out = dir / ("audit_seed" + std::to_string(s) + ".csv");
        std::ofstream file(out);
        if (!file) throw DataError("cannot write " + out.string());
        write_audit_csv(file, report);
        std::printf("seed %llu (%s)\n%s", static_cast<unsigned long long>(s), out.string().c_str(),
                    format_audit_table(report).c_str());
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Incremental learning with an embedding-space Gaussian mixture"};
    app.require_subcommand(1);

    ConfigSource run_src, dump_src, audit_src;
    bool resume = false, quiet = false;
    auto* run = app.add_subcommand("run", "train every seed of an experiment");
    run_src.attach(*run, false);
    run->add_flag("--resume", resume, "continue from the last per-task checkpoint");
    run->add_flag("-q,--quiet", quiet, "no per-epoch progress on stderr");

    std::optional<std::uint64_t> dump_seed, audit_seed;
    std::optional<std::size_t> dump_task;
    std::string dump_out;
    auto* dump = app.add_subcommand("dump-embeddings", "write test-split embeddings as CSV");
    dump_src.attach(*dump, true);
    dump->add_option("--seed", dump_seed, "seed to read (default: first configured seed)");
    dump->add_option("--task", dump_task, "snapshot after this task, 1-based (default: last)");
    dump->add_option("-o,--out", dump_out, "output CSV path");

    std::size_t projections = 200;
    auto* audit = app.add_subcommand("audit", "measure forgetting terms from per-task snapshots");
    audit_src.attach(*audit, true);
    audit->add_option("--seed", audit_seed, "seed to audit (default: all configured seeds)");
    audit->add_option("--projections", projections, "slicing directions per estimate")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run) return cmd_run(run_src, resume, quiet);
        if (*dump) return cmd_dump(dump_src, dump_seed, dump_task, dump_out);
        return cmd_audit(audit_src, audit_seed, projections);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}
