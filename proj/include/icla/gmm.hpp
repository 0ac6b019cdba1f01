#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "icla/embedding.hpp"
#include "icla/matrix.hpp"
#include "icla/rng.hpp"

namespace icla::gmm {

using nn::Matrix;

enum class CovarianceMode { full, diagonal };

struct FitOptions {
    double ridge = 1e-6;        // initial eps added to every covariance diagonal
    double max_ridge = 1e-2;    // escalation (x10) stops here
    CovarianceMode mode = CovarianceMode::full;
};

struct Component {
    int class_id = 0;
    double alpha = 0.0;
    std::vector<double> mean;
    Matrix covariance;   // includes the ridge actually applied
    Matrix cholesky;     // lower triangular, covariance = L L^T
    double ridge = 0.0;

    friend bool operator==(const Component&, const Component&) = default;
};

// One Gaussian per observed class, ordered by class id.
struct GaussianMixture {
    std::size_t dim = 0;
    std::vector<Component> components;

    std::size_t size() const noexcept { return components.size(); }
    std::vector<int> class_ids() const;
    const Component* find(int class_id) const noexcept;

    friend bool operator==(const GaussianMixture&, const GaussianMixture&) = default;
};

// Closed-form supervised MAP estimate: per-class frequency, mean and
// (1/|S_j|) scatter, plus a ridge; the Cholesky factor is cached.
GaussianMixture fit_map(const EmbeddingBatch& embeddings, const FitOptions& options = {});

// Refit on current and pseudo embeddings pooled. Every class in
// `known_classes` must appear in the union.
GaussianMixture update_distribution(const EmbeddingBatch& current, const EmbeddingBatch& pseudo,
                                    std::span<const int> known_classes,
                                    const FitOptions& options = {});

// Exactly `per_class` draws mu + L e from every component, in component order.
EmbeddingBatch sample(const GaussianMixture& gmm, std::size_t per_class, Rng& rng);
// `per_class` draws from a single component.
Matrix sample_component(const Component& component, std::size_t count, Rng& rng);

double log_density(const Component& component, std::span<const double> z);

// Responsibilities alpha_j N(z | mu_j, Sigma_j), normalized per row (batch x k).
Matrix component_posterior(const GaussianMixture& gmm, const Matrix& z);

// Lower Cholesky factor of a symmetric matrix; nullopt if not positive definite.
std::optional<Matrix> cholesky(const Matrix& a);

}  // namespace icla::gmm
