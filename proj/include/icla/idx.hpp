#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "icla/matrix.hpp"

namespace icla::data {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;  // 2051
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;  // 2049

// Raw IDX file: big-endian 32-bit magic, big-endian 32-bit dimensions, u8 payload.
struct IdxFile {
    std::uint32_t magic = 0;
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> payload;
};

IdxFile parse_idx(std::span<const std::uint8_t> bytes);
IdxFile load_idx(const std::filesystem::path& path);

// n x (product of trailing dims), scaled to [0, 1] by /255.
nn::Matrix idx_images(const IdxFile& file);
std::vector<int> idx_labels(const IdxFile& file);

// Serializes to the on-disk layout (used by fixtures and the fetch tooling).
std::vector<std::uint8_t> encode_idx(const IdxFile& file);

}  // namespace icla::data
