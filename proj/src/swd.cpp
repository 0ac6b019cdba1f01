#include "icla/swd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "icla/errors.hpp"

namespace icla::swd {

Matrix draw_directions(std::size_t count, std::size_t dim, Rng& rng) {
    if (count == 0) throw ArgumentError("draw_directions: need at least one projection");
    if (dim == 0) throw ArgumentError("draw_directions: dimension must be positive");
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix dirs(count, dim);
    for (std::size_t l = 0; l < count; ++l) {
        auto row = dirs.row(l);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (double& v : row) {
                v = normal(rng);
                norm2 += v * v;
            }
        } while (norm2 == 0.0);
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : row) v *= inv;
    }
    return dirs;
}

namespace {

std::vector<std::size_t> sorted_order(const Matrix& proj, std::size_t col) {
    std::vector<std::size_t> idx(proj.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return proj(x, col) < proj(y, col); });
    return idx;
}

}  // namespace

SwdResult swd2(const Matrix& a, const Matrix& b, const Matrix& directions) {
    if (a.rows() == 0 || b.rows() == 0) throw ArgumentError("swd2: empty point set");
    if (a.cols() != b.cols() || a.cols() != directions.cols()) {
        throw DimensionError("swd2: dimension mismatch");
    }
    if (directions.rows() == 0) throw ArgumentError("swd2: no projection directions");

    const std::size_t n = a.rows();
    const std::size_t m = b.rows();
    const std::size_t num_dirs = directions.rows();
    const Matrix pa = nn::matmul_nt(a, directions);  // n x L
    const Matrix pb = nn::matmul_nt(b, directions);  // m x L

    SwdResult result{0.0, Matrix(n, a.cols())};
    std::vector<double> coef(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    const double inv_l = 1.0 / static_cast<double>(num_dirs);

    for (std::size_t l = 0; l < num_dirs; ++l) {
        const auto ia = sorted_order(pa, l);
        const auto ib = sorted_order(pb, l);
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double target;
            if (n == m) {
                target = pb(ib[i], l);
            } else {
                const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n) *
                                     static_cast<double>(m) - 0.5;
                if (t <= 0.0) {
                    target = pb(ib[0], l);
                } else if (t >= static_cast<double>(m - 1)) {
                    target = pb(ib[m - 1], l);
                } else {
                    const auto j = static_cast<std::size_t>(std::floor(t));
                    const double w = t - static_cast<double>(j);
                    target = (1.0 - w) * pb(ib[j], l) + w * pb(ib[j + 1], l);
                }
            }
            const double gap = pa(ia[i], l) - target;
            cost += gap * gap;
            coef[ia[i]] = 2.0 * gap * inv_n * inv_l;
        }
        result.value += cost * inv_n;
        auto dir = directions.row(l);
        for (std::size_t r = 0; r < n; ++r) {
            auto g = result.grad.row(r);
            for (std::size_t k = 0; k < g.size(); ++k) g[k] += coef[r] * dir[k];
        }
    }
    result.value *= inv_l;
    return result;
}

SwdResult swd2(const Matrix& a, const Matrix& b, const SwdConfig& config) {
    Rng rng(config.seed);
    return swd2(a, b, draw_directions(config.num_projections, a.cols(), rng));
}

SwdResult class_conditional_swd(const EmbeddingBatch& current, const EmbeddingBatch& pseudo,
                                std::span<const int> shared_classes, const Matrix& directions) {
    if (current.points.rows() != current.labels.size() ||
        pseudo.points.rows() != pseudo.labels.size()) {
        throw DimensionError("class_conditional_swd: label count mismatch");
    }
    SwdResult total{0.0, Matrix(current.points.rows(), current.points.cols())};
    for (int cls : shared_classes) {
        const auto cur_rows = rows_of_class(current.labels, cls);
        const auto pse_rows = rows_of_class(pseudo.labels, cls);
        if (cur_rows.empty() || pse_rows.empty()) {
            throw AlignmentError("class_conditional_swd: shared class " + std::to_string(cls) +
                                     " missing from the " +
                                     (cur_rows.empty() ? "current" : "pseudo") + " batch",
                                 cls);
        }
        const SwdResult part = swd2(nn::gather_rows(current.points, cur_rows),
                                    nn::gather_rows(pseudo.points, pse_rows), directions);
        total.value += part.value;
        for (std::size_t i = 0; i < cur_rows.size(); ++i) {
            auto src = part.grad.row(i);
            auto dst = total.grad.row(cur_rows[i]);
            for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
        }
    }
    return total;
}

}  // namespace icla::swd
