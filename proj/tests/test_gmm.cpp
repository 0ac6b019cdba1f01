#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "icla/embedding.hpp"
#include "icla/errors.hpp"
#include "icla/gmm.hpp"

using namespace icla;
using namespace icla::gmm;
using nn::Matrix;

namespace {

// Hand-rolled bivariate normal density for the grid oracle.
double normal2(double x, double y, const std::vector<double>& mu, const Matrix& s) {
    const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
    const double dx = x - mu[0], dy = y - mu[1];
    const double q = (s(1, 1) * dx * dx - 2.0 * s(0, 1) * dx * dy + s(0, 0) * dy * dy) / det;
    return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(det));
}

}  // namespace

// Class 0 holds (0,0), (2,0), (1,3); class 1 holds the single point (5,5).
// By hand: alpha = (3/4, 1/4); mu0 = (1,1); deviations x: (-1,1,0), y: (-1,-1,2)
// so the 1/|S| scatter is [[2/3, 0], [0, 2]]; class 1 has zero scatter.
TEST(GmmFit, ThreePointFixtureMatchesClosedForm) {
    const EmbeddingBatch batch{Matrix{{0, 0}, {2, 0}, {1, 3}, {5, 5}}, {0, 0, 0, 1}};
    const FitOptions opts{1e-6, 1e-2, CovarianceMode::full};
    const auto g = fit_map(batch, opts);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g.dim, 2u);
    const auto& c0 = g.components[0];
    EXPECT_EQ(c0.class_id, 0);
    EXPECT_NEAR(c0.alpha, 0.75, 1e-12);
    EXPECT_NEAR(c0.mean[0], 1.0, 1e-12);
    EXPECT_NEAR(c0.mean[1], 1.0, 1e-12);
    EXPECT_NEAR(c0.covariance(0, 0), 2.0 / 3.0 + 1e-6, 1e-12);
    EXPECT_NEAR(c0.covariance(1, 1), 2.0 + 1e-6, 1e-12);
    EXPECT_NEAR(c0.covariance(0, 1), 0.0, 1e-12);
    EXPECT_NEAR(c0.covariance(1, 0), 0.0, 1e-12);
    EXPECT_EQ(c0.ridge, 1e-6);
    const auto& c1 = g.components[1];
    EXPECT_NEAR(c1.alpha, 0.25, 1e-12);
    EXPECT_EQ(c1.mean, (std::vector<double>{5, 5}));
    EXPECT_NEAR(c1.covariance(0, 0), 1e-6, 1e-18);
    EXPECT_NEAR(c1.covariance(0, 1), 0.0, 1e-18);
}

TEST(GmmFit, CorrelatedScatterAndDiagonalMode) {
    // (0,0), (1,1), (2,2), (3,1): mean (1.5, 1); sums of products by hand.
    const EmbeddingBatch batch{Matrix{{0, 0}, {1, 1}, {2, 2}, {3, 1}}, {4, 4, 4, 4}};
    const auto full = fit_map(batch);
    EXPECT_NEAR(full.components[0].covariance(0, 0), 5.0 / 4.0 + 1e-6, 1e-12);
    EXPECT_NEAR(full.components[0].covariance(1, 1), 2.0 / 4.0 + 1e-6, 1e-12);
    EXPECT_NEAR(full.components[0].covariance(0, 1), 2.0 / 4.0, 1e-12);
    EXPECT_NEAR(full.components[0].alpha, 1.0, 1e-15);
    const auto diag = fit_map(batch, {1e-6, 1e-2, CovarianceMode::diagonal});
    EXPECT_EQ(diag.components[0].covariance(0, 1), 0.0);
    EXPECT_NEAR(diag.components[0].covariance(1, 1), 0.5 + 1e-6, 1e-12);
}

TEST(GmmFit, CholeskyFactorReproducesCovariance) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    Matrix z(200, 4);
    for (double& v : z.values()) v = n(rng);
    std::vector<int> labels(200);
    for (std::size_t i = 0; i < 200; ++i) labels[i] = static_cast<int>(i % 3);
    const auto g = fit_map({z, labels});
    for (const auto& c : g.components) {
        const Matrix llt = nn::matmul_nt(c.cholesky, c.cholesky);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                EXPECT_NEAR(llt(i, j), c.covariance(i, j), 1e-12);
                if (j > i) EXPECT_EQ(c.cholesky(i, j), 0.0);
            }
        }
    }
}

TEST(GmmFit, SampleThenFitRecoversMixture) {
    // Independent sampler: explicit 2x2 Cholesky factors written out here.
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> n;
    std::bernoulli_distribution pick_second(0.7);
    const std::size_t total = 5000;
    Matrix z(total, 2);
    std::vector<int> labels(total);
    for (std::size_t i = 0; i < total; ++i) {
        const double e0 = n(rng), e1 = n(rng);
        if (pick_second(rng)) {
            // mean (4, 1), covariance [[1, 0.5], [0.5, 2]]: L = [[1, 0], [0.5, sqrt(1.75)]]
            z(i, 0) = 4.0 + e0;
            z(i, 1) = 1.0 + 0.5 * e0 + std::sqrt(1.75) * e1;
            labels[i] = 1;
        } else {
            // mean (0, 0), covariance diag(0.5, 0.25)
            z(i, 0) = std::sqrt(0.5) * e0;
            z(i, 1) = 0.5 * e1;
            labels[i] = 0;
        }
    }
    const auto g = fit_map({z, labels});
    ASSERT_EQ(g.size(), 2u);
    EXPECT_NEAR(g.components[0].alpha, 0.3, 0.02);
    EXPECT_NEAR(g.components[1].alpha, 0.7, 0.02);
    EXPECT_NEAR(g.components[0].mean[0], 0.0, 0.05);
    EXPECT_NEAR(g.components[0].mean[1], 0.0, 0.05);
    EXPECT_NEAR(g.components[1].mean[0], 4.0, 0.05);
    EXPECT_NEAR(g.components[1].mean[1], 1.0, 0.05);
    EXPECT_NEAR(g.components[1].covariance(0, 1), 0.5, 0.1);

    // And the fitted model's own sampler reproduces its parameters.
    Rng srng(5);
    const auto draws = sample(g, 20000, srng);
    const auto refit = fit_map(draws);
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t i = 0; i < 2; ++i) {
            EXPECT_NEAR(refit.components[k].mean[i], g.components[k].mean[i], 0.05);
            for (std::size_t j = 0; j < 2; ++j) {
                EXPECT_NEAR(refit.components[k].covariance(i, j), g.components[k].covariance(i, j),
                            0.06);
            }
        }
    }
}

TEST(GmmDensity, LogDensityAndPosteriorMatchGridOracle) {
    const EmbeddingBatch batch{Matrix{{0, 0}, {2, 1}, {1, 3}, {-1, 1}, {5, 5}, {6, 4}, {5, 7}},
                               {0, 0, 0, 0, 1, 1, 1}};
    const auto g = fit_map(batch);
    Matrix grid(121, 2);
    std::size_t r = 0;
    for (int i = 0; i <= 10; ++i) {
        for (int j = 0; j <= 10; ++j, ++r) {
            grid(r, 0) = -2.0 + 0.9 * i;
            grid(r, 1) = -2.0 + 0.9 * j;
        }
    }
    const Matrix post = component_posterior(g, grid);
    for (std::size_t k = 0; k < grid.rows(); ++k) {
        const double x = grid(k, 0), y = grid(k, 1);
        double w[2];
        for (int c = 0; c < 2; ++c) {
            const auto& comp = g.components[static_cast<std::size_t>(c)];
            const double p = normal2(x, y, comp.mean, comp.covariance);
            EXPECT_NEAR(log_density(comp, grid.row(k)), std::log(p), 1e-9);
            w[c] = comp.alpha * p;
        }
        EXPECT_NEAR(post(k, 0), w[0] / (w[0] + w[1]), 1e-10);
        EXPECT_NEAR(post(k, 0) + post(k, 1), 1.0, 1e-12);
    }
}

TEST(GmmFit, RidgeEscalatesForDegenerateClasses) {
    // Three identical 2D points: zero scatter, rank 0. Ridge 1e-6 already fixes it.
    const auto g = fit_map({Matrix{{1, 1}, {1, 1}, {1, 1}}, {0, 0, 0}});
    EXPECT_EQ(g.components[0].ridge, 1e-6);
    // A huge collinear scatter with a tiny starting ridge needs escalation.
    const auto h = fit_map({Matrix{{0, 0}, {1e3, 1e3}}, {0, 0}}, {1e-16, 1e-2, CovarianceMode::full});
    EXPECT_GT(h.components[0].ridge, 1e-12);
    EXPECT_TRUE(cholesky(h.components[0].covariance).has_value());
}

TEST(GmmFit, ErrorPaths) {
    EXPECT_THROW(fit_map({Matrix(0, 2), {}}), EstimationError);
    EXPECT_THROW(fit_map({Matrix(2, 2), {0}}), DimensionError);
    Matrix bad{{0, 0}, {1, std::nan("")}};
    EXPECT_THROW(fit_map({bad, {0, 0}}), EstimationError);
    EXPECT_FALSE(cholesky(Matrix{{1, 2}, {2, 1}}).has_value());
    EXPECT_THROW(cholesky(Matrix(2, 3)), DimensionError);
}

TEST(GmmUpdate, ComponentCountGrowsWithNewClassesOnly) {
    const EmbeddingBatch current{Matrix{{0, 0}, {1, 0}, {0, 1}, {9, 9}}, {2, 2, 2, 3}};
    const EmbeddingBatch pseudo{Matrix{{5, 0}, {6, 0}, {0, 5}, {0, 6}}, {0, 0, 1, 1}};
    const std::vector<int> known{0, 1};
    const auto g = update_distribution(current, pseudo, known);
    EXPECT_EQ(g.class_ids(), (std::vector<int>{0, 1, 2, 3}));
    double total = 0.0;
    for (const auto& c : g.components) total += c.alpha;
    EXPECT_NEAR(total, 1.0, 1e-15);
    EXPECT_NEAR(g.find(2)->alpha, 3.0 / 8.0, 1e-15);
    const std::vector<int> missing{0, 1, 7};
    EXPECT_THROW(update_distribution(current, pseudo, missing), EstimationError);
}

TEST(GmmSample, ExactCountsAndDeterminism) {
    const auto g = fit_map({Matrix{{0, 0}, {1, 0}, {5, 5}, {6, 5}, {5, 6}}, {0, 0, 1, 1, 1}});
    Rng a(3), b(3);
    const auto s1 = sample(g, 17, a);
    const auto s2 = sample(g, 17, b);
    EXPECT_EQ(s1.points, s2.points);
    EXPECT_EQ(s1.labels.size(), 34u);
    EXPECT_EQ(rows_of_class(s1.labels, 0).size(), 17u);
    EXPECT_EQ(rows_of_class(s1.labels, 1).size(), 17u);
    Rng c(3);
    EXPECT_THROW(sample(g, 0, c), ArgumentError);
}
