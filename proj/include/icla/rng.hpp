#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace icla {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_tag(std::string_view tag) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Seed of the substream named `tag` at position `index` under `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                    std::uint64_t index = 0) noexcept {
    return mix64(mix64(base ^ hash_tag(tag)) + index);
}

inline Rng make_rng(std::uint64_t base, std::string_view tag, std::uint64_t index = 0) {
    return Rng{derive_seed(base, tag, index)};
}

}  // namespace icla
