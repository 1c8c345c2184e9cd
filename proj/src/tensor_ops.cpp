#include "tring/tensor_ops.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "tring/error.hpp"
#include "tring/kernels.hpp"

namespace tring {

namespace {

void check_mode(const Shape& shape, std::size_t mode) {
    if (mode >= shape.order()) {
        throw DimensionError("mode " + std::to_string(mode) + " out of range for order-" +
                             std::to_string(shape.order()) + " tensor");
    }
}

// Order in which the non-pivot modes enumerate columns, fastest first.
std::vector<std::size_t> classical_order(std::size_t d, std::size_t mode) {
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < d; ++k)
        if (k != mode) order.push_back(k);
    return order;
}

std::vector<std::size_t> ring_order(std::size_t d, std::size_t mode) {
    std::vector<std::size_t> order;
    for (std::size_t s = 1; s < d; ++s) order.push_back((mode + s) % d);
    return order;
}

// Column stride of every mode (pivot mode gets 0) for the given enumeration order.
std::vector<std::size_t> column_strides(const Shape& shape, std::span<const std::size_t> order) {
    std::vector<std::size_t> strides(shape.order(), 0);
    std::size_t s = 1;
    for (std::size_t k : order) {
        strides[k] = s;
        s *= shape[k];
    }
    return strides;
}

Matrix unfold_ordered(const DenseTensor& x, std::size_t mode, std::span<const std::size_t> order) {
    const Shape& shape = x.shape();
    const std::size_t rows = shape[mode];
    const std::size_t cols = x.size() / rows;
    const auto cstride = column_strides(shape, order);
    Matrix m(rows, cols);
    std::vector<std::size_t> idx(shape.order(), 0);
    for (std::size_t lin = 0; lin < x.size(); ++lin) {
        std::size_t col = 0;
        for (std::size_t k = 0; k < idx.size(); ++k) col += idx[k] * cstride[k];
        m(idx[mode], col) = x[lin];
        next_index(idx, shape.dims());
    }
    return m;
}

DenseTensor fold_ordered(const Matrix& m, std::size_t mode, const Shape& shape,
                         std::span<const std::size_t> order) {
    check_mode(shape, mode);
    if (m.rows() != shape[mode] || m.rows() * m.cols() != shape.numel()) {
        throw DimensionError("fold: matrix " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " does not match shape " + shape.str());
    }
    const auto cstride = column_strides(shape, order);
    DenseTensor x(shape);
    std::vector<std::size_t> idx(shape.order(), 0);
    for (std::size_t lin = 0; lin < x.size(); ++lin) {
        std::size_t col = 0;
        for (std::size_t k = 0; k < idx.size(); ++k) col += idx[k] * cstride[k];
        x[lin] = m(idx[mode], col);
        next_index(idx, shape.dims());
    }
    return x;
}

// Row-major extents before and after a mode.
std::pair<std::size_t, std::size_t> split_extents(const Shape& shape, std::size_t mode) {
    std::size_t left = 1, right = 1;
    for (std::size_t k = 0; k < mode; ++k) left *= shape[k];
    for (std::size_t k = mode + 1; k < shape.order(); ++k) right *= shape[k];
    return {left, right};
}

}  // namespace

double inner_product(const DenseTensor& x, const DenseTensor& y) {
    if (x.shape() != y.shape()) {
        throw DimensionError("inner_product: shapes " + x.shape().str() + " and " +
                             y.shape().str() + " differ");
    }
    return kernels::dot(x.data(), y.data());
}

DenseTensor mode_n_product(const DenseTensor& x, const Matrix& a, std::size_t mode) {
    check_mode(x.shape(), mode);
    if (a.cols() != x.dim(mode)) {
        throw DimensionError("mode_n_product: matrix has " + std::to_string(a.cols()) +
                             " columns, mode has size " + std::to_string(x.dim(mode)));
    }
    const auto [left, right] = split_extents(x.shape(), mode);
    const std::size_t in = x.dim(mode);
    auto dims = x.shape().dims();
    dims[mode] = a.rows();
    DenseTensor z{Shape(dims)};
    for (std::size_t l = 0; l < left; ++l) {
        Matrix slab(in, right,
                    std::vector<double>(x.data().begin() + l * in * right,
                                        x.data().begin() + (l + 1) * in * right));
        const Matrix out = kernels::gemm(a, slab);
        std::copy(out.data().begin(), out.data().end(), z.data().begin() + l * a.rows() * right);
    }
    return z;
}

Matrix unfold_classical(const DenseTensor& x, std::size_t mode) {
    check_mode(x.shape(), mode);
    const auto order = classical_order(x.order(), mode);
    return unfold_ordered(x, mode, order);
}

DenseTensor fold_classical(const Matrix& m, std::size_t mode, const Shape& shape) {
    check_mode(shape, mode);
    const auto order = classical_order(shape.order(), mode);
    return fold_ordered(m, mode, shape, order);
}

Matrix unfold_tr(const DenseTensor& x, std::size_t mode) {
    check_mode(x.shape(), mode);
    const auto order = ring_order(x.order(), mode);
    return unfold_ordered(x, mode, order);
}

DenseTensor fold_tr(const Matrix& m, std::size_t mode, const Shape& shape) {
    check_mode(shape, mode);
    const auto order = ring_order(shape.order(), mode);
    return fold_ordered(m, mode, shape, order);
}

DenseTensor permute(const DenseTensor& x, std::span<const std::size_t> perm) {
    const std::size_t d = x.order();
    if (perm.size() != d) throw DimensionError("permute: permutation length differs from order");
    std::vector<bool> seen(d, false);
    std::vector<std::size_t> dims(d);
    for (std::size_t k = 0; k < d; ++k) {
        if (perm[k] >= d || seen[perm[k]]) throw DimensionError("permute: not a permutation");
        seen[perm[k]] = true;
        dims[k] = x.dim(perm[k]);
    }
    const auto src_strides = x.shape().strides();
    DenseTensor out{Shape(dims)};
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t lin = 0; lin < out.size(); ++lin) {
        std::size_t src = 0;
        for (std::size_t k = 0; k < d; ++k) src += idx[k] * src_strides[perm[k]];
        out[lin] = x[src];
        next_index(idx, dims);
    }
    return out;
}

DenseTensor cycle_to_front(const DenseTensor& x, std::size_t mode) {
    check_mode(x.shape(), mode);
    std::vector<std::size_t> perm(x.order());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = (mode + k) % perm.size();
    return permute(x, perm);
}

DenseTensor contract_single_mode(const DenseTensor& x, const DenseTensor& y, std::size_t x_mode,
                                 std::size_t y_mode) {
    check_mode(x.shape(), x_mode);
    check_mode(y.shape(), y_mode);
    const std::size_t k = x.dim(x_mode);
    if (k != y.dim(y_mode)) {
        throw DimensionError("contract_single_mode: contracted sizes " + std::to_string(k) +
                             " and " + std::to_string(y.dim(y_mode)) + " differ");
    }
    // X as (rest of x) x k, Y as k x (rest of y); both row-major over their rest.
    const auto [xl, xr] = split_extents(x.shape(), x_mode);
    const auto [yl, yr] = split_extents(y.shape(), y_mode);
    Matrix xm(xl * xr, k);
    for (std::size_t l = 0; l < xl; ++l)
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t r = 0; r < xr; ++r) xm(l * xr + r, c) = x[(l * k + c) * xr + r];
    Matrix ym(k, yl * yr);
    for (std::size_t l = 0; l < yl; ++l)
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t r = 0; r < yr; ++r) ym(c, l * yr + r) = y[(l * k + c) * yr + r];
    Matrix z = kernels::gemm(xm, ym);

    std::vector<std::size_t> dims;
    for (std::size_t m = 0; m < x.order(); ++m)
        if (m != x_mode) dims.push_back(x.dim(m));
    for (std::size_t m = 0; m < y.order(); ++m)
        if (m != y_mode) dims.push_back(y.dim(m));
    if (dims.empty()) dims.push_back(1);
    auto flat = z.data();
    return DenseTensor(Shape(dims), std::vector<double>(flat.begin(), flat.end()));
}

double spectral_norm(const Matrix& a) {
    if (a.empty()) throw DimensionError("spectral_norm: empty matrix");
    constexpr double kTol = 1e-10;
    constexpr int kMaxIter = 1000;
    const std::size_t n = a.cols();

    // Fixed pseudo-random start so the result is reproducible.
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    std::vector<double> v(n);
    for (auto& e : v) e = std::abs(normal(rng)) + 0.1;
    double vnorm = std::sqrt(kernels::dot(v, v));
    for (auto& e : v) e /= vnorm;

    double lambda = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
        Matrix vm(n, 1, v);
        const Matrix av = kernels::gemm(a, vm);
        const Matrix w = kernels::gemm_tn(a, av);
        const double wnorm = std::sqrt(kernels::dot(w.data(), w.data()));
        if (wnorm == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w.data()[i] / wnorm;
        const bool converged = std::abs(wnorm - lambda) <= kTol * wnorm;
        lambda = wnorm;
        if (converged) break;
    }
    return std::sqrt(lambda);
}

}  // namespace tring
