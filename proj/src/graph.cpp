#include "tring/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tring/error.hpp"
#include "tring/kernels.hpp"
#include "tring/tensor_ops.hpp"

namespace tring {

Matrix pairwise_distances(const DenseTensor& x, std::size_t sample_mode) {
    if (sample_mode >= x.order()) throw DimensionError("sample mode out of range");
    const std::size_t n = x.dim(sample_mode);
    if (n < 2) throw DimensionError("pairwise distances need at least two samples");
    // Rows of the classical unfolding are the vectorized samples.
    const Matrix samples = unfold_classical(x, sample_mode);
    Matrix d = kernels::pairwise_sq_distances(samples);
    for (double& v : d.data()) v = std::sqrt(v);
    return d;
}

NeighborGraph knn_graph(const Matrix& dist, const GraphConfig& cfg) {
    const std::size_t n = dist.rows();
    if (dist.cols() != n) throw DimensionError("distance matrix must be square");
    if (cfg.p < 1 || cfg.p >= n) {
        throw DomainError("neighbor count p=" + std::to_string(cfg.p) + " must lie in [1, " +
                          std::to_string(n) + ")");
    }
    // in_knn(i, j) = 1 iff j is one of the p nearest samples to i.
    Matrix in_knn(n, n);
    std::vector<std::size_t> order(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order[k++] = j;
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cfg.p),
                          order.end(), [&](std::size_t a, std::size_t b) {
                              const double da = dist(i, a), db = dist(i, b);
                              return da != db ? da < db : a < b;
                          });
        for (std::size_t q = 0; q < cfg.p; ++q) in_knn(i, order[q]) = 1.0;
    }
    NeighborGraph g{Matrix(n, n), std::vector<double>(n, 0.0), Matrix(n, n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && in_knn(i, j) == 1.0 && in_knn(j, i) == 1.0) g.w(i, j) = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = g.w.row(i);
        g.degree[i] = std::accumulate(row.begin(), row.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) g.laplacian(i, j) = -g.w(i, j);
        g.laplacian(i, i) += g.degree[i];
    }
    return g;
}

NeighborGraph build_sample_graph(const DenseTensor& x, const GraphConfig& cfg) {
    return knn_graph(pairwise_distances(x, x.order() - 1), cfg);
}

double laplacian_quadratic(const Matrix& h, const Matrix& g) {
    if (h.rows() != h.cols() || h.cols() != g.rows()) {
        throw DimensionError("laplacian_quadratic: H must be square with as many rows as G");
    }
    const Matrix hg = kernels::gemm(h, g);
    return kernels::dot(g.data(), hg.data());
}

}  // namespace tring
