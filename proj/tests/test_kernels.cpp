#include <gtest/gtest.h>
#include <omp.h>

#include <random>

#include "tring/kernels.hpp"
#include "test_util.hpp"

using namespace tring;
namespace k = tring::kernels;
using tring::testing::max_abs_diff;
using tring::testing::random_matrix;
using tring::testing::random_tensor;

namespace {

constexpr double kTol = 1e-12;

class ThreadCount {
public:
    explicit ThreadCount(int n) : saved_(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~ThreadCount() { omp_set_num_threads(saved_); }

private:
    int saved_;
};

double scale(std::span<const double> v) {
    double m = 1.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void expect_close(const Matrix& a, const Matrix& b) {
    ASSERT_EQ(a.rows(), b.rows());
    ASSERT_EQ(a.cols(), b.cols());
    EXPECT_LE(max_abs_diff(a.data(), b.data()), kTol * scale(b.data()));
}

}  // namespace

// Sizes straddle the parallel threshold so both branches run.
class KernelSizes : public ::testing::TestWithParam<std::size_t> {};

TEST_P(KernelSizes, GemmFamilyMatchesSerial) {
    std::mt19937_64 rng(GetParam());
    const std::size_t n = GetParam();
    const auto a = random_matrix(n, n / 2 + 1, rng);
    const auto b = random_matrix(n / 2 + 1, n + 3, rng);
    const auto c = random_matrix(n, n + 3, rng);
    expect_close(k::gemm(a, b), k::serial::gemm(a, b));
    expect_close(k::gemm_tn(a, c), k::serial::gemm_tn(a, c));
    const auto e = random_matrix(n / 3 + 2, n + 3, rng);
    expect_close(k::gemm_nt(c, e), k::serial::gemm_nt(c, e));
}

TEST_P(KernelSizes, VectorKernelsMatchSerial) {
    std::mt19937_64 rng(GetParam() + 1);
    const std::size_t n = GetParam() * GetParam();
    const auto x = random_matrix(1, n, rng);
    const auto y = random_matrix(1, n, rng);
    EXPECT_NEAR(k::dot(x.data(), y.data()), k::serial::dot(x.data(), y.data()), kTol * static_cast<double>(n));

    std::vector<double> out(n), ref(n);
    k::extrapolate(x.data(), y.data(), 0.37, out);
    k::serial::extrapolate(x.data(), y.data(), 0.37, ref);
    EXPECT_EQ(out, ref);
    k::projected_step(x.data(), y.data(), 0.5, out);
    k::serial::projected_step(x.data(), y.data(), 0.5, ref);
    EXPECT_EQ(out, ref);
}

TEST_P(KernelSizes, DistancesAndChainMatchSerial) {
    std::mt19937_64 rng(GetParam() + 2);
    const auto pts = random_matrix(GetParam(), 7, rng);
    expect_close(k::pairwise_sq_distances(pts), k::serial::pairwise_sq_distances(pts));

    const auto chain = random_tensor(Shape{3, GetParam(), 2}, rng, true);
    const auto core = random_tensor(Shape{2, 5, 4}, rng, true);
    const auto p = k::chain_extend(chain, core);
    const auto s = k::serial::chain_extend(chain, core);
    ASSERT_EQ(p.shape(), s.shape());
    EXPECT_LE(max_abs_diff(p.data(), s.data()), kTol * scale(s.data()));
}

INSTANTIATE_TEST_SUITE_P(Sizes, KernelSizes, ::testing::Values(3, 17, 64, 200));

TEST(Kernels, ThreadCountDoesNotChangeResults) {
    std::mt19937_64 rng(99);
    const auto a = random_matrix(300, 120, rng);
    const auto b = random_matrix(120, 250, rng);
    const auto v = random_matrix(1, 100000, rng);
    Matrix one, four;
    double d1 = 0.0, d4 = 0.0;
    {
        ThreadCount t(1);
        one = k::gemm(a, b);
        d1 = k::dot(v.data(), v.data());
    }
    {
        ThreadCount t(4);
        four = k::gemm(a, b);
        d4 = k::dot(v.data(), v.data());
    }
    EXPECT_EQ(one, four);
    EXPECT_EQ(d1, d4);
}

TEST(Kernels, ChainExtendIndexing) {
    std::mt19937_64 rng(5);
    const auto chain = random_tensor(Shape{2, 3, 2}, rng, true);
    const auto core = random_tensor(Shape{2, 4, 3}, rng, true);
    const auto out = k::chain_extend(chain, core);
    ASSERT_EQ(out.shape(), (Shape{2, 12, 3}));
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t b = 0; b < 3; ++b) {
                    double ref = 0.0;
                    for (std::size_t c = 0; c < 2; ++c) ref += chain.at({a, j, c}) * core.at({c, i, b});
                    EXPECT_NEAR(out.at({a, j + 3 * i, b}), ref, 1e-14);
                }
}

TEST(Kernels, ProjectedStepClampsAtZero) {
    const std::vector<double> y{-1.0, 2.0, 1.0};
    const std::vector<double> g{0.0, 0.0, 3.0};
    std::vector<double> out(3);
    k::projected_step(y, g, 0.5, out);
    EXPECT_EQ(out, (std::vector<double>{0.0, 2.0, 0.0}));
}
