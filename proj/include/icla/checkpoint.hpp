#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icla/gmm.hpp"
#include "icla/model.hpp"
#include "icla/trainer.hpp"

namespace icla::io {

// Versioned little-endian binary checkpoints. Doubles are stored as their
// IEEE-754 bit patterns, so a load reproduces the saved values bitwise.
inline constexpr std::uint32_t kCheckpointVersion = 1;

class BinaryWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v);
    void str(std::string_view s);
    void doubles(std::span<const double> v);
    void matrix(const nn::Matrix& m);

    const std::vector<std::uint8_t>& bytes() const noexcept { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64();
    std::string str();
    std::vector<double> doubles();
    nn::Matrix matrix();

    std::size_t offset() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const;
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void write_params(BinaryWriter& w, const model::NetworkParams& params);
model::NetworkParams read_params(BinaryReader& r);
void write_gmm(BinaryWriter& w, const gmm::GaussianMixture& gmm);
gmm::GaussianMixture read_gmm(BinaryReader& r);
void write_state(BinaryWriter& w, const train::TrainerState& state);
train::TrainerState read_state(BinaryReader& r);

void save_params(const std::filesystem::path& path, const model::NetworkParams& params);
model::NetworkParams load_params(const std::filesystem::path& path);
void save_gmm(const std::filesystem::path& path, const gmm::GaussianMixture& gmm);
gmm::GaussianMixture load_gmm(const std::filesystem::path& path);
void save_state(const std::filesystem::path& path, const train::TrainerState& state);
train::TrainerState load_state(const std::filesystem::path& path);

}  // namespace icla::io
