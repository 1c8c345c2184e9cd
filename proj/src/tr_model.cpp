#include "tring/tr_model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "tring/error.hpp"
#include "tring/kernels.hpp"
#include "tring/tensor_ops.hpp"

namespace tring {

RankVector::RankVector(std::vector<std::size_t> ranks) : ranks_(std::move(ranks)) {
    if (ranks_.empty()) throw DimensionError("rank vector is empty");
    for (std::size_t r : ranks_)
        if (r == 0) throw DimensionError("ring ranks must be at least 1");
}

TRCores::TRCores(std::vector<DenseTensor> cores, bool nonneg)
    : cores_(std::move(cores)), nonneg_(nonneg) {
    if (cores_.empty()) throw DimensionError("tensor ring needs at least one core");
    const std::size_t d = cores_.size();
    for (std::size_t n = 0; n < d; ++n) {
        if (cores_[n].order() != 3) {
            throw DimensionError("core " + std::to_string(n) + " is not third-order");
        }
        if (cores_[n].dim(2) != cores_[(n + 1) % d].dim(0)) {
            throw DimensionError("ring ranks do not chain between core " + std::to_string(n) +
                                 " and core " + std::to_string((n + 1) % d));
        }
        if (nonneg_ && !cores_[n].is_nonnegative()) {
            throw DomainError("core " + std::to_string(n) + " flagged nonnegative has negatives");
        }
    }
}

RankVector TRCores::ranks() const {
    std::vector<std::size_t> r;
    r.reserve(cores_.size());
    for (const auto& c : cores_) r.push_back(c.dim(0));
    return RankVector(std::move(r));
}

Shape TRCores::data_shape() const {
    std::vector<std::size_t> dims;
    dims.reserve(cores_.size());
    for (const auto& c : cores_) dims.push_back(c.dim(1));
    return Shape(std::move(dims));
}

void TRCores::replace_core(std::size_t n, DenseTensor core) {
    if (core.shape() != cores_.at(n).shape()) {
        throw DimensionError("replacement core has shape " + core.shape().str() + ", expected " +
                             cores_[n].shape().str());
    }
    if (nonneg_ && !core.is_nonnegative()) {
        throw DomainError("replacement for nonnegative core " + std::to_string(n) + " has negatives");
    }
    cores_[n] = std::move(core);
}

TRCores init_random(const Shape& shape, const RankVector& ranks, std::uint64_t seed) {
    const std::size_t d = shape.order();
    if (ranks.size() != d) {
        throw DimensionError("rank vector has " + std::to_string(ranks.size()) +
                             " entries for an order-" + std::to_string(d) + " tensor");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<DenseTensor> cores;
    cores.reserve(d);
    for (std::size_t n = 0; n < d; ++n) {
        DenseTensor g(Shape{ranks[n], shape[n], ranks[n + 1]});
        for (double& v : g.data()) v = std::abs(normal(rng));
        cores.push_back(std::move(g));
    }
    return TRCores(std::move(cores), true);
}

Subchain build_subchain(const TRCores& cores, std::size_t n) {
    const std::size_t d = cores.order();
    if (d < 2) throw DimensionError("subchains need a ring of at least two cores");
    if (n >= d) throw DimensionError("subchain mode out of range");
    DenseTensor chain = cores.core((n + 1) % d);
    for (std::size_t s = 2; s < d; ++s) {
        chain = kernels::chain_extend(chain, cores.core((n + s) % d));
    }
    return Subchain{std::move(chain), n};
}

Matrix subchain_unfold2(const Subchain& sub) {
    const auto& t = sub.tensor;
    const std::size_t rb = t.dim(0), m = t.dim(1), ra = t.dim(2);
    Matrix out(m, ra * rb);
    for (std::size_t b = 0; b < rb; ++b)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t a = 0; a < ra; ++a) out(j, a * rb + b) = t[(b * m + j) * ra + a];
    return out;
}

Subchain subchain_fold2(const Matrix& m, std::size_t r_next, std::size_t r_skipped,
                        std::size_t skipped_mode) {
    if (m.cols() != r_next * r_skipped) {
        throw DimensionError("subchain_fold2: column count does not equal r_n * r_{n+1}");
    }
    DenseTensor t(Shape{r_next, m.rows(), r_skipped});
    for (std::size_t b = 0; b < r_next; ++b)
        for (std::size_t j = 0; j < m.rows(); ++j)
            for (std::size_t a = 0; a < r_skipped; ++a)
                t[(b * m.rows() + j) * r_skipped + a] = m(j, a * r_next + b);
    return Subchain{std::move(t), skipped_mode};
}

Matrix core_unfold2(const DenseTensor& core) {
    if (core.order() != 3) throw DimensionError("core_unfold2: core must be third-order");
    const std::size_t ra = core.dim(0), ni = core.dim(1), rb = core.dim(2);
    Matrix out(ni, ra * rb);
    for (std::size_t a = 0; a < ra; ++a)
        for (std::size_t i = 0; i < ni; ++i)
            for (std::size_t b = 0; b < rb; ++b) out(i, a * rb + b) = core[(a * ni + i) * rb + b];
    return out;
}

Matrix core_unfold2(const TRCores& cores, std::size_t n) { return core_unfold2(cores.core(n)); }

DenseTensor core_fold2(const Matrix& m, std::size_t r_n, std::size_t i_n, std::size_t r_next) {
    if (m.rows() != i_n || m.cols() != r_n * r_next) {
        throw DimensionError("core_fold2: matrix " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " does not fold to (" +
                             std::to_string(r_n) + "x" + std::to_string(i_n) + "x" +
                             std::to_string(r_next) + ")");
    }
    DenseTensor g(Shape{r_n, i_n, r_next});
    for (std::size_t a = 0; a < r_n; ++a)
        for (std::size_t i = 0; i < i_n; ++i)
            for (std::size_t b = 0; b < r_next; ++b) g[(a * i_n + i) * r_next + b] = m(i, a * r_next + b);
    return g;
}

DenseTensor reconstruct(const TRCores& cores) {
    const Shape shape = cores.data_shape();
    if (cores.order() == 1) {
        // A single core closes on itself: x(i) = trace of its i-th slice.
        const auto& g = cores.core(0);
        DenseTensor x(shape);
        const std::size_t r = g.dim(0), ni = g.dim(1);
        for (std::size_t i = 0; i < ni; ++i)
            for (std::size_t a = 0; a < r; ++a) x[i] += g[(a * ni + i) * r + a];
        return x;
    }
    const Matrix s2 = subchain_unfold2(build_subchain(cores, 0));
    const Matrix unfolded = kernels::gemm_nt(core_unfold2(cores, 0), s2);
    return fold_tr(unfolded, 0, shape);
}

double relative_error(const DenseTensor& x, const TRCores& cores) {
    const DenseTensor r = reconstruct(cores);
    if (r.shape() != x.shape()) {
        throw DimensionError("relative_error: ring shape " + r.shape().str() +
                             " differs from data shape " + x.shape().str());
    }
    const double xnorm = frobenius_norm(x.data());
    if (xnorm == 0.0) throw DomainError("relative_error: data tensor is zero");
    std::vector<double> diff(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - r[i];
    return frobenius_norm(diff) / xnorm;
}

}  // namespace tring
