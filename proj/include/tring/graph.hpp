#pragma once

#include <cstddef>
#include <vector>

#include "tring/tensor.hpp"

namespace tring {

struct GraphConfig {
    /// Neighbors per sample, 1 <= p < sample count.
    std::size_t p = 5;
};

/// Mutual p-nearest-neighbor graph over the samples and its combinatorial Laplacian.
struct NeighborGraph {
    Matrix w;                    // symmetric 0/1 adjacency, zero diagonal
    std::vector<double> degree;  // D_ii = sum_j W_ij
    Matrix laplacian;            // H = D - W

    [[nodiscard]] std::size_t samples() const noexcept { return w.rows(); }
};

/// Frobenius distances between the slices of `x` along `sample_mode`.
[[nodiscard]] Matrix pairwise_distances(const DenseTensor& x, std::size_t sample_mode);

/// W_ij = 1 iff i is among the p nearest of j and j among the p nearest of i.
/// Self is never a neighbor; equal distances rank the lower sample index first.
[[nodiscard]] NeighborGraph knn_graph(const Matrix& dist, const GraphConfig& cfg);

/// Convenience: distances over the last mode, then knn_graph.
[[nodiscard]] NeighborGraph build_sample_graph(const DenseTensor& x, const GraphConfig& cfg);

/// Tr(G^T H G).
[[nodiscard]] double laplacian_quadratic(const Matrix& h, const Matrix& g);

}  // namespace tring
