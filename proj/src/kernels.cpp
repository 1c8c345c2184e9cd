#include "tring/kernels.hpp"

#include <algorithm>
#include <vector>

#include "tring/error.hpp"

namespace tring::kernels {

namespace {

// Below this many multiply-adds the fork/join overhead dominates.
constexpr std::size_t kParallelWork = 1U << 15;
constexpr std::size_t kDotChunk = 4096;

void require(bool ok, const char* what) {
    if (!ok) throw DimensionError(what);
}

}  // namespace

Matrix gemm(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "gemm: inner dimensions differ");
    const std::size_t m = a.rows(), n = b.cols(), p = a.cols();
    Matrix c(m, n);
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    double* cd = c.data().data();
#pragma omp parallel for schedule(static) if (m * n * p >= kParallelWork)
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = cd + i * n;
        for (std::size_t k = 0; k < p; ++k) {
            const double aik = ad[i * p + k];
            const double* brow = bd + k * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Matrix gemm_tn(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows(), "gemm_tn: row counts differ");
    const std::size_t m = a.cols(), n = b.cols(), p = a.rows();
    Matrix c(m, n);
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    double* cd = c.data().data();
#pragma omp parallel for schedule(static) if (m * n * p >= kParallelWork)
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = cd + i * n;
        for (std::size_t k = 0; k < p; ++k) {
            const double aki = ad[k * m + i];
            const double* brow = bd + k * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aki * brow[j];
        }
    }
    return c;
}

Matrix gemm_nt(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.cols(), "gemm_nt: column counts differ");
    const std::size_t m = a.rows(), n = b.rows(), p = a.cols();
    Matrix c(m, n);
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    double* cd = c.data().data();
#pragma omp parallel for schedule(static) if (m * n * p >= kParallelWork)
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = ad + i * p;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = bd + j * p;
            double s = 0.0;
            for (std::size_t k = 0; k < p; ++k) s += arow[k] * brow[k];
            cd[i * n + j] = s;
        }
    }
    return c;
}

double dot(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "dot: length mismatch");
    const std::size_t n = x.size();
    const std::size_t chunks = (n + kDotChunk - 1) / kDotChunk;
    std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static) if (n >= kParallelWork)
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t lo = c * kDotChunk;
        const std::size_t hi = std::min(n, lo + kDotChunk);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
        partial[c] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

void extrapolate(std::span<const double> x, std::span<const double> prev, double coeff,
                 std::span<double> out) {
    require(x.size() == prev.size() && x.size() == out.size(), "extrapolate: length mismatch");
    const std::size_t n = x.size();
#pragma omp parallel for schedule(static) if (n >= kParallelWork)
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + coeff * (x[i] - prev[i]);
}

void projected_step(std::span<const double> y, std::span<const double> grad, double inv_step,
                    std::span<double> out) {
    require(y.size() == grad.size() && y.size() == out.size(), "projected_step: length mismatch");
    const std::size_t n = y.size();
#pragma omp parallel for schedule(static) if (n >= kParallelWork)
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(0.0, y[i] - grad[i] * inv_step);
}

Matrix pairwise_sq_distances(const Matrix& points) {
    const std::size_t n = points.rows(), f = points.cols();
    Matrix d(n, n);
#pragma omp parallel for schedule(dynamic, 4) if (n * n * f >= kParallelWork)
    for (std::size_t i = 0; i < n; ++i) {
        const auto pi = points.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto pj = points.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < f; ++k) {
                const double diff = pi[k] - pj[k];
                s += diff * diff;
            }
            d(i, j) = s;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) d(i, j) = d(j, i);
    return d;
}

DenseTensor chain_extend(const DenseTensor& chain, const DenseTensor& core) {
    require(chain.order() == 3 && core.order() == 3, "chain_extend: operands must be 3rd-order");
    require(chain.dim(2) == core.dim(0), "chain_extend: rank modes differ");
    const std::size_t a = chain.dim(0), m = chain.dim(1), c = chain.dim(2);
    const std::size_t ni = core.dim(1), b = core.dim(2);
    DenseTensor out(Shape{a, m * ni, b});
    const double* s = chain.data().data();
    const double* g = core.data().data();
    double* o = out.data().data();
    const std::size_t rows = a * m;
    // Each (p, j) row of the chain contributes to ni * b outputs owned by that row alone.
#pragma omp parallel for schedule(static) if (rows * c * ni * b >= kParallelWork)
    for (std::size_t pj = 0; pj < rows; ++pj) {
        const std::size_t p = pj / m, j = pj % m;
        const double* srow = s + pj * c;
        for (std::size_t k = 0; k < ni; ++k) {
            double* orow = o + (p * m * ni + j + m * k) * b;
            for (std::size_t sidx = 0; sidx < c; ++sidx) {
                const double w = srow[sidx];
                const double* grow = g + (sidx * ni + k) * b;
                for (std::size_t q = 0; q < b; ++q) orow[q] += w * grow[q];
            }
        }
    }
    return out;
}

}  // namespace tring::kernels
