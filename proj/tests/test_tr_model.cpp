#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tring/error.hpp"
#include "tring/kernels.hpp"
#include "tring/tensor_ops.hpp"
#include "tring/tr_model.hpp"
#include "test_util.hpp"

using namespace tring;
using namespace tring::testing;

namespace {

double rel_diff(const DenseTensor& a, const DenseTensor& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace

TEST(RankVector, WrapsCyclically) {
    const RankVector r{2, 3, 4};
    EXPECT_EQ(r[3], 2u);
    EXPECT_EQ(r[4], 3u);
    EXPECT_THROW(RankVector({2, 0, 1}), DimensionError);
    EXPECT_THROW(RankVector(std::vector<std::size_t>{}), DimensionError);
}

TEST(TRCoresInvariants, RejectsBrokenChainAndNegatives) {
    std::vector<DenseTensor> bad{DenseTensor(Shape{2, 3, 2}), DenseTensor(Shape{3, 3, 2})};
    EXPECT_THROW(TRCores(bad, false), DimensionError);
    std::vector<DenseTensor> neg{DenseTensor(Shape{1, 2, 1}, {1.0, -1.0}), DenseTensor(Shape{1, 2, 1}, 1.0)};
    EXPECT_THROW(TRCores(neg, true), DomainError);
    EXPECT_NO_THROW(TRCores(neg, false));
    std::vector<DenseTensor> flat{DenseTensor(Shape{2, 3})};
    EXPECT_THROW(TRCores(flat, false), DimensionError);
}

TEST(TRCoresInvariants, ReplaceCoreChecksShapeAndSign) {
    std::mt19937_64 rng(1);
    auto cores = random_cores(Shape{3, 4, 2}, RankVector{2, 3, 1}, rng, true);
    EXPECT_THROW(cores.replace_core(1, DenseTensor(Shape{3, 4, 3})), DimensionError);
    EXPECT_THROW(cores.replace_core(1, DenseTensor(Shape{3, 4, 1}, -1.0)), DomainError);
    cores.replace_core(1, DenseTensor(Shape{3, 4, 1}, 0.5));
    EXPECT_EQ(cores.core(1)[0], 0.5);
    EXPECT_EQ(cores.ranks(), (RankVector{2, 3, 1}));
    EXPECT_EQ(cores.data_shape(), (Shape{3, 4, 2}));
}

TEST(InitRandom, DeterministicAndNonnegative) {
    const auto a = init_random(Shape{4, 5, 3}, RankVector{2, 3, 2}, 42);
    const auto b = init_random(Shape{4, 5, 3}, RankVector{2, 3, 2}, 42);
    EXPECT_EQ(a, b);
    EXPECT_TRUE(a.nonneg());
    for (const auto& g : a.cores()) EXPECT_TRUE(g.is_nonnegative());
    EXPECT_NE(a, init_random(Shape{4, 5, 3}, RankVector{2, 3, 2}, 43));
    EXPECT_THROW((void)init_random(Shape{4, 5}, RankVector{2, 3, 2}, 1), DimensionError);
}

TEST(InitRandom, HalfNormalMean) {
    const auto c = init_random(Shape{4, 4, 4}, RankVector{2, 2, 2}, 7);
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& g : c.cores())
        for (double v : g.data()) {
            sum += v;
            ++count;
        }
    ASSERT_EQ(count, 48u);
    EXPECT_NEAR(sum / static_cast<double>(count), std::sqrt(2.0 / std::acos(-1.0)), 0.1);
}

TEST(Reconstruct, MatchesTraceOracle) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = 2 + trial % 3;
        const auto cores = random_cores(random_shape(rng, d, 4), random_ranks(rng, d, 3), rng);
        EXPECT_LE(rel_diff(reconstruct(cores), trace_reconstruct(cores)), 1e-12);
    }
}

TEST(Reconstruct, SingleCoreIsTraceOfSlices) {
    std::mt19937_64 rng(3);
    const auto cores = random_cores(Shape{5}, RankVector{3}, rng);
    EXPECT_LE(rel_diff(reconstruct(cores), trace_reconstruct(cores)), 1e-14);
}

TEST(Reconstruct, RankOneIsOuterProduct) {
    const std::vector<double> a{1, 2}, b{3, 4, 5}, c{0.5, 2};
    TRCores cores({DenseTensor(Shape{1, 2, 1}, a), DenseTensor(Shape{1, 3, 1}, b), DenseTensor(Shape{1, 2, 1}, c)},
                  true);
    const auto x = reconstruct(cores);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 2; ++k) EXPECT_DOUBLE_EQ(x.at({i, j, k}), a[i] * b[j] * c[k]);
}

TEST(Reconstruct, CircularShiftOfCoresRotatesModes) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 3 + trial % 2;
        const auto cores = random_cores(random_shape(rng, d, 4), random_ranks(rng, d, 3), rng);
        const auto x = reconstruct(cores);
        for (std::size_t k = 1; k < d; ++k) {
            std::vector<DenseTensor> rotated;
            for (std::size_t n = 0; n < d; ++n) rotated.push_back(cores.core((n + k) % d));
            EXPECT_LE(rel_diff(reconstruct(TRCores(rotated, false)), cycle_to_front(x, k)), 1e-12);
        }
    }
}

TEST(Subchain, ModeUnfoldingFactorsThroughCore) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = 2 + trial % 3;
        const auto cores = random_cores(random_shape(rng, d, 4), random_ranks(rng, d, 3), rng);
        const auto x = trace_reconstruct(cores);
        for (std::size_t n = 0; n < d; ++n) {
            const Subchain sub = build_subchain(cores, n);
            EXPECT_EQ(sub.skipped_mode, n);
            const Matrix s2 = subchain_unfold2(sub);
            const Matrix prod = kernels::gemm_nt(core_unfold2(cores, n), s2);
            const Matrix ref = unfold_tr(x, n);
            EXPECT_LE(max_abs_diff(prod.data(), ref.data()), 1e-12);
        }
    }
}

TEST(Subchain, TwoCoresLeaveTheOtherCore) {
    std::mt19937_64 rng(6);
    const auto cores = random_cores(Shape{3, 4}, RankVector{2, 3}, rng);
    EXPECT_EQ(build_subchain(cores, 0).tensor, cores.core(1));
    EXPECT_EQ(build_subchain(cores, 1).tensor, cores.core(0));
}

TEST(Subchain, TwoCoreUnfoldingPairsColumns) {
    std::mt19937_64 rng(7);
    const auto cores = random_cores(Shape{3, 4}, RankVector{2, 3}, rng);
    const Matrix s2 = subchain_unfold2(build_subchain(cores, 0));
    const DenseTensor& g = cores.core(1);  // r_2 x i_2 x r_1 = 3 x 4 x 2
    ASSERT_EQ(s2.rows(), 4u);
    ASSERT_EQ(s2.cols(), 6u);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 3; ++b) EXPECT_EQ(s2(i, a * 3 + b), g.at({b, i, a}));
}

TEST(Subchain, RankOneIsKroneckerOfVectors) {
    const std::vector<double> a{1, 2}, b{3, 5, 7}, c{2, 11};
    TRCores cores({DenseTensor(Shape{1, 2, 1}, a), DenseTensor(Shape{1, 3, 1}, b), DenseTensor(Shape{1, 2, 1}, c)},
                  true);
    const Matrix s2 = subchain_unfold2(build_subchain(cores, 0));
    ASSERT_EQ(s2.cols(), 1u);
    ASSERT_EQ(s2.rows(), 6u);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(s2(j + 3 * k, 0), b[j] * c[k]);
}

TEST(Subchain, FoldInvertsUnfold) {
    std::mt19937_64 rng(8);
    const auto cores = random_cores(Shape{3, 2, 4}, RankVector{2, 3, 2}, rng);
    for (std::size_t n = 0; n < 3; ++n) {
        const auto sub = build_subchain(cores, n);
        const auto back = subchain_fold2(subchain_unfold2(sub), cores.ranks()[n + 1], cores.ranks()[n], n);
        EXPECT_EQ(back.tensor, sub.tensor);
        EXPECT_EQ(back.skipped_mode, n);
    }
    EXPECT_THROW((void)subchain_fold2(Matrix(4, 5), 2, 2, 0), DimensionError);
}

TEST(Subchain, SingleCoreRingThrows) {
    std::mt19937_64 rng(9);
    EXPECT_THROW((void)build_subchain(random_cores(Shape{3}, RankVector{2}, rng), 0), DimensionError);
}

TEST(CoreUnfold, Golden) {
    DenseTensor g(Shape{2, 3, 2});
    for (std::size_t i = 0; i < 12; ++i) g[i] = static_cast<double>(i);
    EXPECT_EQ(core_unfold2(g), (Matrix{{0, 1, 6, 7}, {2, 3, 8, 9}, {4, 5, 10, 11}}));
    EXPECT_EQ(core_fold2(core_unfold2(g), 2, 3, 2), g);
}

TEST(CoreUnfold, RankOneIsColumnVector) {
    const DenseTensor g(Shape{1, 4, 1}, {1, 2, 3, 4});
    EXPECT_EQ(core_unfold2(g), (Matrix{{1}, {2}, {3}, {4}}));
    EXPECT_THROW((void)core_fold2(Matrix(4, 2), 1, 4, 1), DimensionError);
}

TEST(RelativeError, ExactZeroAndPerturbed) {
    std::mt19937_64 rng(10);
    const auto cores = random_cores(Shape{4, 3, 5}, RankVector{2, 2, 3}, rng, true);
    const auto x = reconstruct(cores);
    EXPECT_LE(relative_error(x, cores), 1e-12);

    std::vector<DenseTensor> zeros;
    for (const auto& g : cores.cores()) zeros.emplace_back(g.shape(), 0.0);
    EXPECT_DOUBLE_EQ(relative_error(x, TRCores(zeros, true)), 1.0);

    std::normal_distribution<double> normal;
    std::vector<DenseTensor> noise;
    for (const auto& g : cores.cores()) {
        DenseTensor e(g.shape());
        for (double& v : e.data()) v = normal(rng);
        noise.push_back(e);
    }
    double prev = 0.0;
    for (double eps : {1e-6, 1e-4, 1e-2}) {
        std::vector<DenseTensor> pert;
        for (std::size_t n = 0; n < 3; ++n) {
            DenseTensor g = cores.core(n);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += eps * noise[n][i];
            pert.push_back(g);
        }
        const double err = relative_error(x, TRCores(pert, false));
        EXPECT_GT(err, prev);
        EXPECT_LT(err, 100.0 * eps);
        EXPECT_GT(err, 0.01 * eps);
        prev = err;
    }
    EXPECT_THROW((void)relative_error(DenseTensor(Shape{4, 3, 5}), cores), DomainError);
    EXPECT_THROW((void)relative_error(DenseTensor(Shape{4, 3, 4}, 1.0), cores), DimensionError);
}
