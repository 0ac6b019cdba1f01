#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "icla/matrix.hpp"
#include "icla/rng.hpp"

namespace icla::testing {

inline nn::Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    nn::Matrix m(rows, cols);
    for (double& v : m.values()) v = n(rng);
    return m;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("icla-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace icla::testing
