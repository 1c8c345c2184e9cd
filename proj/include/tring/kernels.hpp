#pragma once

// Data-parallel inner loops shared by the tensor, ring, graph and solver code.
//
// Every kernel in `tring::kernels` is OpenMP-parallel over output elements or
// fixed-size chunks, so results do not depend on the thread count. The
// `tring::kernels::serial` namespace holds plain-loop reference versions of
// the same kernels; they are what the parallel versions are tested and
// benchmarked against.

#include <cstddef>
#include <span>

#include "tring/tensor.hpp"

namespace tring::kernels {

/// C = A B
[[nodiscard]] Matrix gemm(const Matrix& a, const Matrix& b);
/// C = A^T B
[[nodiscard]] Matrix gemm_tn(const Matrix& a, const Matrix& b);
/// C = A B^T
[[nodiscard]] Matrix gemm_nt(const Matrix& a, const Matrix& b);

/// Sum of x[i] * y[i], accumulated in fixed 4096-element chunks.
[[nodiscard]] double dot(std::span<const double> x, std::span<const double> y);

/// out = x + coeff * (x - prev)
void extrapolate(std::span<const double> x, std::span<const double> prev, double coeff,
                 std::span<double> out);

/// out = max(0, y - grad * inv_step)
void projected_step(std::span<const double> y, std::span<const double> grad, double inv_step,
                    std::span<double> out);

/// Squared Euclidean distances between the rows of `points`.
[[nodiscard]] Matrix pairwise_sq_distances(const Matrix& points);

/// One link of a ring contraction.
///
/// `chain` has shape (a, m, c) and `core` has shape (c, i, b). The result has
/// shape (a, m * i, b) with entry (p, j + m * k, q) = sum_s chain(p, j, s) core(s, k, q),
/// so the indices already absorbed into the middle mode stay fastest.
[[nodiscard]] DenseTensor chain_extend(const DenseTensor& chain, const DenseTensor& core);

namespace serial {

[[nodiscard]] Matrix gemm(const Matrix& a, const Matrix& b);
[[nodiscard]] Matrix gemm_tn(const Matrix& a, const Matrix& b);
[[nodiscard]] Matrix gemm_nt(const Matrix& a, const Matrix& b);
[[nodiscard]] double dot(std::span<const double> x, std::span<const double> y);
void extrapolate(std::span<const double> x, std::span<const double> prev, double coeff,
                 std::span<double> out);
void projected_step(std::span<const double> y, std::span<const double> grad, double inv_step,
                    std::span<double> out);
[[nodiscard]] Matrix pairwise_sq_distances(const Matrix& points);
[[nodiscard]] DenseTensor chain_extend(const DenseTensor& chain, const DenseTensor& core);

}  // namespace serial

}  // namespace tring::kernels
