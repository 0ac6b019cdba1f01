#include "icla/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include "icla/errors.hpp"

namespace icla::gmm {

std::vector<int> GaussianMixture::class_ids() const {
    std::vector<int> ids;
    ids.reserve(components.size());
    for (const auto& c : components) ids.push_back(c.class_id);
    return ids;
}

const Component* GaussianMixture::find(int class_id) const noexcept {
    for (const auto& c : components) {
        if (c.class_id == class_id) return &c;
    }
    return nullptr;
}

std::optional<Matrix> cholesky(const Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionError("cholesky: matrix not square");
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag)) return std::nullopt;
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

namespace {

Component fit_component(const Matrix& points, const std::vector<std::size_t>& rows, int class_id,
                        std::size_t n_total, const FitOptions& options) {
    const std::size_t f = points.cols();
    const double count = static_cast<double>(rows.size());
    Component c;
    c.class_id = class_id;
    c.alpha = count / static_cast<double>(n_total);
    c.mean.assign(f, 0.0);
    for (std::size_t r : rows) {
        auto p = points.row(r);
        for (std::size_t k = 0; k < f; ++k) c.mean[k] += p[k];
    }
    for (double& m : c.mean) m /= count;

    Matrix centered = nn::gather_rows(points, rows);
    for (std::size_t r = 0; r < centered.rows(); ++r) {
        auto p = centered.row(r);
        for (std::size_t k = 0; k < f; ++k) p[k] -= c.mean[k];
    }
    Matrix scatter = nn::matmul_tn(centered, centered);
    for (double& v : scatter.values()) v /= count;
    // Exact symmetry regardless of GEMM blocking.
    for (std::size_t i = 0; i < f; ++i) {
        for (std::size_t j = i + 1; j < f; ++j) {
            const double avg = 0.5 * (scatter(i, j) + scatter(j, i));
            scatter(i, j) = avg;
            scatter(j, i) = avg;
        }
    }
    if (options.mode == CovarianceMode::diagonal) {
        for (std::size_t i = 0; i < f; ++i) {
            for (std::size_t j = 0; j < f; ++j) {
                if (i != j) scatter(i, j) = 0.0;
            }
        }
    }

    for (double eps = options.ridge; eps <= options.max_ridge * (1.0 + 1e-9); eps *= 10.0) {
        Matrix cov = scatter;
        for (std::size_t i = 0; i < f; ++i) cov(i, i) += eps;
        if (auto l = cholesky(cov)) {
            c.covariance = std::move(cov);
            c.cholesky = std::move(*l);
            c.ridge = eps;
            return c;
        }
    }
    throw EstimationError("fit_map: covariance of class " + std::to_string(class_id) +
                              " is not positive definite even with ridge " +
                              std::to_string(options.max_ridge),
                          class_id);
}

}  // namespace

GaussianMixture fit_map(const EmbeddingBatch& embeddings, const FitOptions& options) {
    const Matrix& z = embeddings.points;
    if (z.rows() != embeddings.labels.size()) {
        throw DimensionError("fit_map: point count does not match label count");
    }
    if (z.rows() == 0) throw EstimationError("fit_map: no embeddings", -1);
    if (!z.all_finite()) throw EstimationError("fit_map: non-finite embedding", -1);
    if (!(options.ridge > 0.0)) throw ArgumentError("fit_map: ridge must be positive");

    const std::set<int> classes(embeddings.labels.begin(), embeddings.labels.end());
    GaussianMixture gmm;
    gmm.dim = z.cols();
    for (int cls : classes) {
        const auto rows = rows_of_class(embeddings.labels, cls);
        gmm.components.push_back(fit_component(z, rows, cls, z.rows(), options));
    }
    return gmm;
}

GaussianMixture update_distribution(const EmbeddingBatch& current, const EmbeddingBatch& pseudo,
                                    std::span<const int> known_classes,
                                    const FitOptions& options) {
    const EmbeddingBatch combined = concat(current, pseudo);
    const std::set<int> present(combined.labels.begin(), combined.labels.end());
    for (int cls : known_classes) {
        if (!present.contains(cls)) {
            throw EstimationError("update_distribution: previously known class " +
                                      std::to_string(cls) + " has no samples",
                                  cls);
        }
    }
    return fit_map(combined, options);
}

Matrix sample_component(const Component& component, std::size_t count, Rng& rng) {
    const std::size_t f = component.mean.size();
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix out(count, f);
    std::vector<double> e(f);
    for (std::size_t s = 0; s < count; ++s) {
        for (double& v : e) v = normal(rng);
        auto row = out.row(s);
        for (std::size_t i = 0; i < f; ++i) {
            double acc = component.mean[i];
            for (std::size_t k = 0; k <= i; ++k) acc += component.cholesky(i, k) * e[k];
            row[i] = acc;
        }
    }
    return out;
}

EmbeddingBatch sample(const GaussianMixture& gmm, std::size_t per_class, Rng& rng) {
    if (per_class == 0) throw ArgumentError("sample: per_class must be >= 1");
    EmbeddingBatch out{Matrix(per_class * gmm.size(), gmm.dim), {}};
    out.labels.reserve(per_class * gmm.size());
    std::size_t r = 0;
    for (const auto& c : gmm.components) {
        const Matrix draws = sample_component(c, per_class, rng);
        for (std::size_t s = 0; s < per_class; ++s, ++r) {
            auto src = draws.row(s);
            std::copy(src.begin(), src.end(), out.points.row(r).begin());
            out.labels.push_back(c.class_id);
        }
    }
    return out;
}

double log_density(const Component& component, std::span<const double> z) {
    const std::size_t f = component.mean.size();
    if (z.size() != f) throw DimensionError("log_density: dimension mismatch");
    // Forward substitution: L y = z - mu.
    std::vector<double> y(f);
    double log_det = 0.0;
    for (std::size_t i = 0; i < f; ++i) {
        double s = z[i] - component.mean[i];
        for (std::size_t k = 0; k < i; ++k) s -= component.cholesky(i, k) * y[k];
        y[i] = s / component.cholesky(i, i);
        log_det += std::log(component.cholesky(i, i));
    }
    double quad = 0.0;
    for (double v : y) quad += v * v;
    return -0.5 * (static_cast<double>(f) * std::log(2.0 * std::numbers::pi) + quad) - log_det;
}

Matrix component_posterior(const GaussianMixture& gmm, const Matrix& z) {
    if (z.cols() != gmm.dim) throw DimensionError("component_posterior: dimension mismatch");
    Matrix out(z.rows(), gmm.size());
    for (std::size_t r = 0; r < z.rows(); ++r) {
        auto row = out.row(r);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < gmm.size(); ++j) {
            const auto& c = gmm.components[j];
            row[j] = std::log(c.alpha) + log_density(c, z.row(r));
            best = std::max(best, row[j]);
        }
        double sum = 0.0;
        for (double& v : row) {
            v = std::exp(v - best);
            sum += v;
        }
        for (double& v : row) v /= sum;
    }
    return out;
}

}  // namespace icla::gmm
