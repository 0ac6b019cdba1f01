#include "icla/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "icla/errors.hpp"
#include "icla/rng.hpp"

namespace icla::harness {

namespace {

using nlohmann::json;

const std::set<std::string> kProtocols = {"blobs2T", "blobs3T", "blobs-drift", "mnist9T",
                                          "fmnist4T", "mnist5T", "mnist2T", "pmnist"};
const std::set<std::string> kStrategies = {"icla", "fr", "mb", "naive"};

template <typename T>
void take(const json& j, const char* key, T& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

bool non_negative_integer(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

// Numbers for size fields must be non-negative integers; nlohmann would
// silently wrap -1 to a huge unsigned value.
void take_size(const json& j, const char* key, std::size_t& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!non_negative_integer(*it)) {
        throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
    }
    out = it->get<std::size_t>();
}

void take_u64(const json& j, const char* key, std::uint64_t& out) {
    std::size_t v = out;
    take_size(j, key, v);
    out = v;
}

void take_size_opt(const json& j, const char* key, std::optional<std::size_t>& out) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return;
    std::size_t v = 0;
    take_size(j, key, v);
    out = v;
}

void take_activation(const json& j, const char* key, std::optional<nn::Activation>& out) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return;
    if (!it->is_string()) throw ConfigError(std::string("config key '") + key + "' must be a string");
    try {
        out = nn::parse_activation(it->get<std::string>());
    } catch (const Error& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

template <typename T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

json opt_act(const std::optional<nn::Activation>& v) {
    return v ? json(std::string(nn::to_string(*v))) : json(nullptr);
}

}  // namespace

void ExperimentConfig::validate() const {
    if (!kProtocols.contains(protocol)) throw ConfigError("unknown protocol '" + protocol + "'");
    if (!kStrategies.contains(strategy)) throw ConfigError("unknown strategy '" + strategy + "'");
    if (seeds.empty()) throw ConfigError("seeds must list at least one seed");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ConfigError("seeds must be distinct");
    }
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
    if (!(tau >= 0.0 && tau < 1.0)) throw ConfigError("tau must lie in [0, 1)");
    if (epochs_per_task == 0) throw ConfigError("epochs_per_task must be >= 1");
    if (batch_size < 2) throw ConfigError("batch_size must be >= 2");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (swd_projections == 0) throw ConfigError("swd_projections must be >= 1");
    if (max_attempts_factor == 0) throw ConfigError("max_attempts_factor must be >= 1");
    if (covariance != "full" && covariance != "diagonal") {
        throw ConfigError("covariance must be 'full' or 'diagonal'");
    }
    if (!(ridge > 0.0) || !(max_ridge >= ridge)) throw ConfigError("need 0 < ridge <= max_ridge");
    if (buffer_capacity && *buffer_capacity == 0) throw ConfigError("buffer_capacity must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
        throw ConfigError("train_fraction must lie in (0, 1]");
    }
    if (!(test_fraction > 0.0 && test_fraction <= 1.0)) {
        throw ConfigError("test_fraction must lie in (0, 1]");
    }
    if (permuted_tasks == 0 || permuted_tasks > 5) throw ConfigError("permuted_tasks must lie in 1..5");
    if (embedding_dim && *embedding_dim == 0) throw ConfigError("embedding_dim must be >= 1");
    if (hidden && std::ranges::count(*hidden, std::size_t{0}) > 0) {
        throw ConfigError("hidden layer widths must be >= 1");
    }
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        const json defaults = to_json(ExperimentConfig{});
        for (const auto& [key, value] : defaults.items()) k.push_back(key);
        return k;
    }();
    return keys;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const auto& keys = config_keys();
    for (const auto& [key, value] : j.items()) {
        if (std::ranges::find(keys, key) == keys.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    ExperimentConfig c;
    take(j, "protocol", c.protocol);
    take(j, "strategy", c.strategy);
    if (auto it = j.find("seeds"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("config key 'seeds' must be an array");
        c.seeds.clear();
        for (const auto& s : *it) {
            if (!non_negative_integer(s)) throw ConfigError("seeds must be non-negative integers");
            c.seeds.push_back(s.get<std::uint64_t>());
        }
    }
    take(j, "output_dir", c.output_dir);
    take(j, "data_dir", c.data_dir);
    take_size(j, "jobs", c.jobs);
    take(j, "gamma", c.gamma);
    take(j, "lambda", c.lambda);
    take(j, "tau", c.tau);
    take_size(j, "epochs_per_task", c.epochs_per_task);
    take_size(j, "batch_size", c.batch_size);
    take(j, "learning_rate", c.learning_rate);
    take_size(j, "swd_projections", c.swd_projections);
    take_size(j, "pseudo_per_class", c.pseudo_per_class);
    take_size(j, "max_attempts_factor", c.max_attempts_factor);
    take(j, "require_argmax", c.require_argmax);
    take(j, "covariance", c.covariance);
    take(j, "ridge", c.ridge);
    take(j, "max_ridge", c.max_ridge);
    take_size_opt(j, "buffer_capacity", c.buffer_capacity);
    take(j, "train_fraction", c.train_fraction);
    take(j, "test_fraction", c.test_fraction);
    take_u64(j, "data_seed", c.data_seed);
    take_size(j, "permuted_tasks", c.permuted_tasks);
    if (auto it = j.find("hidden"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw ConfigError("config key 'hidden' must be an array");
        std::vector<std::size_t> h;
        for (const auto& w : *it) {
            if (!w.is_number_unsigned()) throw ConfigError("hidden widths must be positive integers");
            h.push_back(w.get<std::size_t>());
        }
        c.hidden = h;
    }
    take_size_opt(j, "embedding_dim", c.embedding_dim);
    take_activation(j, "hidden_activation", c.hidden_activation);
    take_activation(j, "embedding_activation", c.embedding_activation);
    take_activation(j, "output_activation", c.output_activation);
    take(j, "keep_snapshots", c.keep_snapshots);
    c.validate();
    return c;
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["protocol"] = c.protocol;
    j["strategy"] = c.strategy;
    j["seeds"] = c.seeds;
    j["output_dir"] = c.output_dir;
    j["data_dir"] = c.data_dir;
    j["jobs"] = c.jobs;
    j["gamma"] = c.gamma;
    j["lambda"] = c.lambda;
    j["tau"] = c.tau;
    j["epochs_per_task"] = c.epochs_per_task;
    j["batch_size"] = c.batch_size;
    j["learning_rate"] = c.learning_rate;
    j["swd_projections"] = c.swd_projections;
    j["pseudo_per_class"] = c.pseudo_per_class;
    j["max_attempts_factor"] = c.max_attempts_factor;
    j["require_argmax"] = c.require_argmax;
    j["covariance"] = c.covariance;
    j["ridge"] = c.ridge;
    j["max_ridge"] = c.max_ridge;
    j["buffer_capacity"] = opt(c.buffer_capacity);
    j["train_fraction"] = c.train_fraction;
    j["test_fraction"] = c.test_fraction;
    j["data_seed"] = c.data_seed;
    j["permuted_tasks"] = c.permuted_tasks;
    j["hidden"] = opt(c.hidden);
    j["embedding_dim"] = opt(c.embedding_dim);
    j["hidden_activation"] = opt_act(c.hidden_activation);
    j["embedding_activation"] = opt_act(c.embedding_activation);
    j["output_activation"] = opt_act(c.output_activation);
    j["keep_snapshots"] = c.keep_snapshots;
    return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << to_json(cfg).dump(2) << '\n';
}

std::string config_hash(const ExperimentConfig& cfg) {
    json j = to_json(cfg);
    for (const char* key : {"output_dir", "data_dir", "jobs", "keep_snapshots"}) j.erase(key);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(hash_tag(j.dump())));
    return buf;
}

std::filesystem::path experiment_dir(const ExperimentConfig& cfg) {
    return std::filesystem::path(cfg.output_dir) /
           (cfg.protocol + "-" + cfg.strategy + "-" + config_hash(cfg));
}

}  // namespace icla::harness
