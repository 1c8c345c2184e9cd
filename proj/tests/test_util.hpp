#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "tring/tensor.hpp"
#include "tring/tr_model.hpp"

namespace tring {

inline void PrintTo(const Matrix& m, std::ostream* os) {
    *os << m.rows() << "x" << m.cols() << " [";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        *os << (r ? "; " : "");
        for (std::size_t c = 0; c < m.cols(); ++c) *os << (c ? " " : "") << m(r, c);
    }
    *os << "]";
}

inline void PrintTo(const Shape& s, std::ostream* os) { *os << s.str(); }

}  // namespace tring

namespace tring::testing {

inline Shape random_shape(std::mt19937_64& rng, std::size_t order, std::size_t max_dim) {
    std::uniform_int_distribution<std::size_t> dim(1, max_dim);
    std::vector<std::size_t> dims(order);
    for (auto& d : dims) d = dim(rng);
    return Shape(dims);
}

inline DenseTensor random_tensor(const Shape& shape, std::mt19937_64& rng, bool signed_values = false) {
    DenseTensor x(shape);
    std::uniform_real_distribution<double> u(signed_values ? -1.0 : 0.0, 1.0);
    for (double& v : x.data()) v = u(rng);
    return x;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                            bool signed_values = true) {
    Matrix m(rows, cols);
    std::uniform_real_distribution<double> u(signed_values ? -1.0 : 0.0, 1.0);
    for (double& v : m.data()) v = u(rng);
    return m;
}

inline RankVector random_ranks(std::mt19937_64& rng, std::size_t order, std::size_t max_rank) {
    std::uniform_int_distribution<std::size_t> r(1, max_rank);
    std::vector<std::size_t> ranks(order);
    for (auto& v : ranks) v = r(rng);
    return RankVector(ranks);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Element of the ring tensor as the trace of the product of lateral core slices.
inline double trace_element(const TRCores& cores, const std::vector<std::size_t>& idx) {
    const std::size_t d = cores.order();
    const DenseTensor& g0 = cores.core(0);
    const std::size_t r0 = g0.dim(0);
    std::vector<double> prod(r0 * r0, 0.0);
    for (std::size_t a = 0; a < r0; ++a) prod[a * r0 + a] = 1.0;
    std::size_t cols = r0;
    for (std::size_t n = 0; n < d; ++n) {
        const DenseTensor& g = cores.core(n);
        const std::size_t next = g.dim(2);
        std::vector<double> out(r0 * next, 0.0);
        for (std::size_t a = 0; a < r0; ++a)
            for (std::size_t b = 0; b < next; ++b)
                for (std::size_t c = 0; c < cols; ++c) out[a * next + b] += prod[a * cols + c] * g.at({c, idx[n], b});
        prod = std::move(out);
        cols = next;
    }
    double tr = 0.0;
    for (std::size_t a = 0; a < r0; ++a) tr += prod[a * r0 + a];
    return tr;
}

inline DenseTensor trace_reconstruct(const TRCores& cores) {
    const Shape shape = cores.data_shape();
    DenseTensor x(shape);
    std::vector<std::size_t> idx(shape.order(), 0);
    do {
        x.at(idx) = trace_element(cores, idx);
    } while (next_index(idx, shape.dims()));
    return x;
}

inline TRCores random_cores(const Shape& shape, const RankVector& ranks, std::mt19937_64& rng,
                            bool nonneg = false) {
    std::vector<DenseTensor> cores;
    for (std::size_t n = 0; n < shape.order(); ++n) {
        cores.push_back(random_tensor(Shape{ranks[n], shape[n], ranks[n + 1]}, rng, !nonneg));
    }
    return TRCores(std::move(cores), nonneg);
}

}  // namespace tring::testing
