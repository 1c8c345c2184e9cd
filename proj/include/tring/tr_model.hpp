#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tring/tensor.hpp"

namespace tring {

/// Cyclic ring ranks r_1, ..., r_d. The closing rank r_{d+1} = r_1 is implied.
class RankVector {
public:
    RankVector() = default;
    explicit RankVector(std::vector<std::size_t> ranks);
    RankVector(std::initializer_list<std::size_t> ranks)
        : RankVector(std::vector<std::size_t>(ranks)) {}

    [[nodiscard]] std::size_t size() const noexcept { return ranks_.size(); }
    /// Rank entering core k (0-based); k == size() wraps to the first rank.
    [[nodiscard]] std::size_t operator[](std::size_t k) const { return ranks_.at(k % ranks_.size()); }
    [[nodiscard]] const std::vector<std::size_t>& values() const noexcept { return ranks_; }

    friend bool operator==(const RankVector&, const RankVector&) = default;

private:
    std::vector<std::size_t> ranks_;
};

/// The d third-order cores of a tensor ring. Core n has shape r_n x i_n x r_{n+1}
/// and the last core closes the ring onto the first.
class TRCores {
public:
    TRCores() = default;
    TRCores(std::vector<DenseTensor> cores, bool nonneg);

    [[nodiscard]] std::size_t order() const noexcept { return cores_.size(); }
    [[nodiscard]] const DenseTensor& core(std::size_t n) const { return cores_.at(n); }
    [[nodiscard]] const std::vector<DenseTensor>& cores() const noexcept { return cores_; }
    [[nodiscard]] bool nonneg() const noexcept { return nonneg_; }

    [[nodiscard]] RankVector ranks() const;
    /// Shape (i_1, ..., i_d) of the tensor the ring represents.
    [[nodiscard]] Shape data_shape() const;

    /// Swap in a new core n of identical shape. Clears the nonnegative flag if
    /// the replacement has a negative entry.
    void replace_core(std::size_t n, DenseTensor core);

    friend bool operator==(const TRCores&, const TRCores&) = default;

private:
    std::vector<DenseTensor> cores_;
    bool nonneg_ = false;
};

/// Product of every core but one, contracted around the ring.
///
/// `tensor` has shape r_{n+1} x (prod_{j != n} i_j) x r_n; the middle index
/// enumerates (i_{n+1}, ..., i_d, i_1, ..., i_{n-1}) with i_{n+1} fastest.
struct Subchain {
    DenseTensor tensor;
    std::size_t skipped_mode = 0;
};

/// Cores with i.i.d. |N(0,1)| entries, deterministic in `seed`.
[[nodiscard]] TRCores init_random(const Shape& shape, const RankVector& ranks, std::uint64_t seed);

[[nodiscard]] Subchain build_subchain(const TRCores& cores, std::size_t n);

/// Mode-2 unfolding of a subchain: (prod_{j != n} i_j) x (r_n r_{n+1}).
/// Column a * r_{n+1} + b holds entry (b, :, a) of the subchain.
[[nodiscard]] Matrix subchain_unfold2(const Subchain& sub);
[[nodiscard]] Subchain subchain_fold2(const Matrix& m, std::size_t r_next, std::size_t r_skipped,
                                      std::size_t skipped_mode);

/// Mode-2 unfolding of a core: i_n x (r_n r_{n+1}), column a * r_{n+1} + b = G(a, :, b).
[[nodiscard]] Matrix core_unfold2(const DenseTensor& core);
[[nodiscard]] Matrix core_unfold2(const TRCores& cores, std::size_t n);
[[nodiscard]] DenseTensor core_fold2(const Matrix& m, std::size_t r_n, std::size_t i_n,
                                     std::size_t r_next);

/// Full tensor represented by the ring.
[[nodiscard]] DenseTensor reconstruct(const TRCores& cores);

/// ||x - reconstruct(cores)||_F / ||x||_F. Throws DomainError if x is zero.
[[nodiscard]] double relative_error(const DenseTensor& x, const TRCores& cores);

}  // namespace tring
