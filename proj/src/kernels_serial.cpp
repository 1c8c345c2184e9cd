// Reference kernels: straightforward loops, no threading, no chunking.

#include <algorithm>

#include "tring/error.hpp"
#include "tring/kernels.hpp"

namespace tring::kernels::serial {

Matrix gemm(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("gemm: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

Matrix gemm_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw DimensionError("gemm_tn: row counts differ");
    Matrix c(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, i) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

Matrix gemm_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw DimensionError("gemm_nt: column counts differ");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
            c(i, j) = s;
        }
    return c;
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

void extrapolate(std::span<const double> x, std::span<const double> prev, double coeff,
                 std::span<double> out) {
    if (x.size() != prev.size() || x.size() != out.size())
        throw DimensionError("extrapolate: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + coeff * (x[i] - prev[i]);
}

void projected_step(std::span<const double> y, std::span<const double> grad, double inv_step,
                    std::span<double> out) {
    if (y.size() != grad.size() || y.size() != out.size())
        throw DimensionError("projected_step: length mismatch");
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = std::max(0.0, y[i] - grad[i] * inv_step);
}

Matrix pairwise_sq_distances(const Matrix& points) {
    Matrix d(points.rows(), points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i)
        for (std::size_t j = 0; j < points.rows(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < points.cols(); ++k) {
                const double diff = points(i, k) - points(j, k);
                s += diff * diff;
            }
            d(i, j) = s;
        }
    return d;
}

DenseTensor chain_extend(const DenseTensor& chain, const DenseTensor& core) {
    if (chain.order() != 3 || core.order() != 3 || chain.dim(2) != core.dim(0))
        throw DimensionError("chain_extend: incompatible operands");
    const std::size_t a = chain.dim(0), m = chain.dim(1), c = chain.dim(2);
    const std::size_t ni = core.dim(1), b = core.dim(2);
    DenseTensor out(Shape{a, m * ni, b});
    for (std::size_t p = 0; p < a; ++p)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < ni; ++k)
                for (std::size_t q = 0; q < b; ++q) {
                    double s = 0.0;
                    for (std::size_t t = 0; t < c; ++t)
                        s += chain.at({p, j, t}) * core.at({t, k, q});
                    out.at({p, j + m * k, q}) = s;
                }
    return out;
}

}  // namespace tring::kernels::serial
