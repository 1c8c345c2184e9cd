#pragma once

// Multilinear primitives on dense tensors. Mode indices are 0-based throughout.

#include <cstddef>
#include <span>
#include <vector>

#include "tring/tensor.hpp"

namespace tring {

/// Sum of elementwise products; throws DimensionError if the shapes differ.
[[nodiscard]] double inner_product(const DenseTensor& x, const DenseTensor& y);

/// Z = X x_n A: replaces dimension i_n by a.rows(), contracting over a's columns.
[[nodiscard]] DenseTensor mode_n_product(const DenseTensor& x, const Matrix& a, std::size_t mode);

/// Classical mode-n unfolding X_(n): i_n rows, columns enumerate the remaining
/// indices (i_1, ..., i_{n-1}, i_{n+1}, ..., i_d) with i_1 varying fastest.
[[nodiscard]] Matrix unfold_classical(const DenseTensor& x, std::size_t mode);
[[nodiscard]] DenseTensor fold_classical(const Matrix& m, std::size_t mode, const Shape& shape);

/// Ring-ordered mode-n unfolding X_[n]: i_n rows, columns enumerate
/// (i_{n+1}, ..., i_d, i_1, ..., i_{n-1}) with i_{n+1} varying fastest.
[[nodiscard]] Matrix unfold_tr(const DenseTensor& x, std::size_t mode);
[[nodiscard]] DenseTensor fold_tr(const Matrix& m, std::size_t mode, const Shape& shape);

/// Generic axis permutation: result dimension k is input dimension perm[k].
[[nodiscard]] DenseTensor permute(const DenseTensor& x, std::span<const std::size_t> perm);

/// Circular shift of the modes so that `mode` comes first:
/// (i_n, i_{n+1}, ..., i_d, i_1, ..., i_{n-1}).
[[nodiscard]] DenseTensor cycle_to_front(const DenseTensor& x, std::size_t mode);

/// Contraction of one mode of x with one mode of y. The result carries the
/// remaining modes of x followed by the remaining modes of y; contracting two
/// vectors yields a shape-(1) tensor.
[[nodiscard]] DenseTensor contract_single_mode(const DenseTensor& x, const DenseTensor& y,
                                               std::size_t x_mode, std::size_t y_mode);

/// Largest singular value by power iteration on A^T A
/// (relative tolerance 1e-10, at most 1000 iterations). Zero matrix gives 0.
[[nodiscard]] double spectral_norm(const Matrix& a);

}  // namespace tring
