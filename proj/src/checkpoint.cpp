#include "icla/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "icla/errors.hpp"

namespace icla::io {

namespace {

constexpr std::string_view kParamsMagic = "ICLAPRM";
constexpr std::string_view kGmmMagic = "ICLAGMM";
constexpr std::string_view kStateMagic = "ICLASTA";

void write_header(BinaryWriter& w, std::string_view magic) {
    w.str(magic);
    w.u32(kCheckpointVersion);
}

void read_header(BinaryReader& r, std::string_view magic) {
    const std::size_t at = r.offset();
    if (r.str() != magic) throw ParseError("checkpoint: expected a " + std::string(magic) + " block", at);
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        throw ParseError("checkpoint: unsupported version " + std::to_string(version), at);
    }
}

void write_layer(BinaryWriter& w, const nn::DenseLayer& l) {
    w.u8(static_cast<std::uint8_t>(l.activation));
    w.matrix(l.weights);
    w.doubles(l.bias);
}

nn::DenseLayer read_layer(BinaryReader& r) {
    const std::size_t at = r.offset();
    const auto act = r.u8();
    if (act > static_cast<std::uint8_t>(nn::Activation::linear)) {
        throw ParseError("checkpoint: bad activation tag", at);
    }
    nn::DenseLayer l;
    l.activation = static_cast<nn::Activation>(act);
    l.weights = r.matrix();
    l.bias = r.doubles();
    if (l.bias.size() != l.weights.rows()) throw ParseError("checkpoint: bias/weight mismatch", at);
    return l;
}

void write_grad(BinaryWriter& w, const nn::LayerGrad& g) {
    w.matrix(g.weights);
    w.doubles(g.bias);
}

nn::LayerGrad read_grad(BinaryReader& r) {
    nn::LayerGrad g;
    g.weights = r.matrix();
    g.bias = r.doubles();
    return g;
}

void write_adam(BinaryWriter& w, const nn::AdamState& s) {
    w.u64(s.step);
    w.f64(s.config.lr);
    w.f64(s.config.beta1);
    w.f64(s.config.beta2);
    w.f64(s.config.eps);
    w.u64(s.first.size());
    for (std::size_t i = 0; i < s.first.size(); ++i) {
        write_grad(w, s.first[i]);
        write_grad(w, s.second[i]);
    }
}

nn::AdamState read_adam(BinaryReader& r) {
    nn::AdamState s;
    s.step = r.u64();
    s.config.lr = r.f64();
    s.config.beta1 = r.f64();
    s.config.beta2 = r.f64();
    s.config.eps = r.f64();
    const auto n = r.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
        s.first.push_back(read_grad(r));
        s.second.push_back(read_grad(r));
    }
    return s;
}

void write_file(const std::filesystem::path& path, const BinaryWriter& w) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp);
        out.write(reinterpret_cast<const char*>(w.bytes().data()),
                  static_cast<std::streamsize>(w.bytes().size()));
        if (!out) throw DataError("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename T, typename ReadFn>
T load(const std::filesystem::path& path, ReadFn read) {
    const auto bytes = read_file(path);
    BinaryReader r(bytes);
    try {
        T value = read(r);
        if (!r.at_end()) throw ParseError("checkpoint: trailing bytes", r.offset());
        return value;
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.offset());
    }
}

}  // namespace

void BinaryWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(std::string_view s) {
    u64(s.size());
    buf_.insert(buf_.end(), s.begin(), s.end());
}

void BinaryWriter::doubles(std::span<const double> v) {
    u64(v.size());
    for (double d : v) f64(d);
}

void BinaryWriter::matrix(const nn::Matrix& m) {
    u64(m.rows());
    u64(m.cols());
    for (double d : m.values()) f64(d);
}

void BinaryReader::need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw ParseError("checkpoint: truncated data", pos_);
}

std::uint8_t BinaryReader::u8() {
    need(1);
    return bytes_[pos_++];
}

std::uint32_t BinaryReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_++]} << (8 * i);
    return v;
}

std::uint64_t BinaryReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_++]} << (8 * i);
    return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() {
    const auto n = u64();
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
}

std::vector<double> BinaryReader::doubles() {
    const auto n = u64();
    need(n * 8);
    std::vector<double> v(n);
    for (auto& d : v) d = f64();
    return v;
}

nn::Matrix BinaryReader::matrix() {
    const auto rows = u64();
    const auto cols = u64();
    if (cols != 0 && rows > (bytes_.size() - pos_) / 8 / cols) {
        throw ParseError("checkpoint: matrix larger than the remaining data", pos_);
    }
    std::vector<double> data(rows * cols);
    for (auto& d : data) d = f64();
    return nn::Matrix(rows, cols, std::move(data));
}

void write_params(BinaryWriter& w, const model::NetworkParams& p) {
    write_header(w, kParamsMagic);
    w.u64(p.encoder.size());
    for (const auto& l : p.encoder) write_layer(w, l);
    w.u64(p.decoder.size());
    for (const auto& l : p.decoder) write_layer(w, l);
    write_layer(w, p.head);
}

model::NetworkParams read_params(BinaryReader& r) {
    read_header(r, kParamsMagic);
    model::NetworkParams p;
    const auto ne = r.u64();
    for (std::uint64_t i = 0; i < ne; ++i) p.encoder.push_back(read_layer(r));
    const auto nd = r.u64();
    for (std::uint64_t i = 0; i < nd; ++i) p.decoder.push_back(read_layer(r));
    p.head = read_layer(r);
    return p;
}

void write_gmm(BinaryWriter& w, const gmm::GaussianMixture& g) {
    write_header(w, kGmmMagic);
    w.u64(g.dim);
    w.u64(g.components.size());
    for (const auto& c : g.components) {
        w.i64(c.class_id);
        w.f64(c.alpha);
        w.doubles(c.mean);
        w.matrix(c.covariance);
        w.matrix(c.cholesky);
        w.f64(c.ridge);
    }
}

gmm::GaussianMixture read_gmm(BinaryReader& r) {
    read_header(r, kGmmMagic);
    gmm::GaussianMixture g;
    g.dim = r.u64();
    const auto n = r.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
        gmm::Component c;
        c.class_id = static_cast<int>(r.i64());
        c.alpha = r.f64();
        c.mean = r.doubles();
        c.covariance = r.matrix();
        c.cholesky = r.matrix();
        c.ridge = r.f64();
        g.components.push_back(std::move(c));
    }
    return g;
}

void write_state(BinaryWriter& w, const train::TrainerState& s) {
    write_header(w, kStateMagic);
    w.u64(s.next_task);
    write_params(w, s.params);
    write_adam(w, s.optimizer.encoder);
    write_adam(w, s.optimizer.decoder);
    write_adam(w, s.optimizer.head);
    w.u8(s.gmm.has_value());
    if (s.gmm) write_gmm(w, *s.gmm);
    w.u64(s.buffer.capacity());
    w.u64(s.buffer.classes().size());
    for (const auto& [cls, rows] : s.buffer.classes()) {
        w.i64(cls);
        w.matrix(rows);
    }
    w.u64(s.curve.num_tasks);
    w.u64(s.curve.rows.size());
    for (const auto& row : s.curve.rows) {
        w.u64(row.task);
        w.u64(row.epoch);
        w.f64(row.seen_accuracy);
        w.doubles(row.task_accuracy);
    }
    w.u64(s.last_acceptance.size());
    for (const auto& a : s.last_acceptance) {
        w.i64(a.class_id);
        w.u64(a.attempts);
        w.u64(a.accepted);
    }
}

train::TrainerState read_state(BinaryReader& r) {
    read_header(r, kStateMagic);
    train::TrainerState s;
    s.next_task = r.u64();
    s.params = read_params(r);
    s.optimizer.encoder = read_adam(r);
    s.optimizer.decoder = read_adam(r);
    s.optimizer.head = read_adam(r);
    if (r.u8()) s.gmm = read_gmm(r);
    const auto capacity = r.u64();
    std::map<int, nn::Matrix> store;
    const auto nclasses = r.u64();
    for (std::uint64_t i = 0; i < nclasses; ++i) {
        const auto cls = static_cast<int>(r.i64());
        store.emplace(cls, r.matrix());
    }
    s.buffer = replay::ReplayBuffer::from_parts(capacity, std::move(store));
    s.curve.num_tasks = r.u64();
    const auto nrows = r.u64();
    for (std::uint64_t i = 0; i < nrows; ++i) {
        train::CurveRow row;
        row.task = r.u64();
        row.epoch = r.u64();
        row.seen_accuracy = r.f64();
        row.task_accuracy = r.doubles();
        s.curve.rows.push_back(std::move(row));
    }
    const auto nacc = r.u64();
    for (std::uint64_t i = 0; i < nacc; ++i) {
        replay::ClassAcceptance a;
        a.class_id = static_cast<int>(r.i64());
        a.attempts = r.u64();
        a.accepted = r.u64();
        s.last_acceptance.push_back(a);
    }
    return s;
}

void save_params(const std::filesystem::path& path, const model::NetworkParams& params) {
    BinaryWriter w;
    write_params(w, params);
    write_file(path, w);
}

model::NetworkParams load_params(const std::filesystem::path& path) {
    return load<model::NetworkParams>(path, [](BinaryReader& r) { return read_params(r); });
}

void save_gmm(const std::filesystem::path& path, const gmm::GaussianMixture& g) {
    BinaryWriter w;
    write_gmm(w, g);
    write_file(path, w);
}

gmm::GaussianMixture load_gmm(const std::filesystem::path& path) {
    return load<gmm::GaussianMixture>(path, [](BinaryReader& r) { return read_gmm(r); });
}

void save_state(const std::filesystem::path& path, const train::TrainerState& state) {
    BinaryWriter w;
    write_state(w, state);
    write_file(path, w);
}

train::TrainerState load_state(const std::filesystem::path& path) {
    return load<train::TrainerState>(path, [](BinaryReader& r) { return read_state(r); });
}

}  // namespace icla::io
