// Serial reference kernels against their OpenMP versions.
//
//   ./bench_kernels --benchmark_filter=gemm
//
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "tring/kernels.hpp"
#include "tring/tr_model.hpp"

namespace {

using namespace tring;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix m(rows, cols);
    for (double& v : m.data()) v = u(rng);
    return m;
}

// Shapes mirror the solver's hot path: X_[n] (i_n x prod) times S2 (prod x r^2).
template <Matrix (*Kernel)(const Matrix&, const Matrix&)>
void bm_gemm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(n, 16 * n, 1), b = random_matrix(16 * n, 16, 2);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * 16 * n * 16));
}

template <Matrix (*Kernel)(const Matrix&, const Matrix&)>
void bm_gemm_tn(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix s = random_matrix(16 * n, 16, 3);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(s, s));
}

template <double (*Kernel)(std::span<const double>, std::span<const double>)>
void bm_dot(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix x = random_matrix(n, 1, 4), y = random_matrix(n, 1, 5);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(x.data(), y.data()));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * sizeof(double)));
}

template <Matrix (*Kernel)(const Matrix&)>
void bm_distances(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix p = random_matrix(n, 108, 6);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(p));
}

template <DenseTensor (*Kernel)(const DenseTensor&, const DenseTensor&)>
void bm_chain(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto cores = init_random(Shape{n, n, 3, 20}, RankVector{4, 4, 4, 4}, 7);
    const DenseTensor chain = Kernel(Kernel(cores.core(0), cores.core(1)), cores.core(2));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(chain, cores.core(3)));
}

}  // namespace

BENCHMARK(bm_gemm<kernels::serial::gemm>)->Name("gemm/serial")->RangeMultiplier(2)->Range(16, 128);
BENCHMARK(bm_gemm<kernels::gemm>)->Name("gemm/parallel")->RangeMultiplier(2)->Range(16, 128)->UseRealTime();
BENCHMARK(bm_gemm_tn<kernels::serial::gemm_tn>)->Name("gemm_tn/serial")->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(bm_gemm_tn<kernels::gemm_tn>)->Name("gemm_tn/parallel")->RangeMultiplier(4)->Range(64, 4096)->UseRealTime();
BENCHMARK(bm_dot<kernels::serial::dot>)->Name("dot/serial")->RangeMultiplier(16)->Range(1 << 10, 1 << 22);
BENCHMARK(bm_dot<kernels::dot>)->Name("dot/parallel")->RangeMultiplier(16)->Range(1 << 10, 1 << 22)->UseRealTime();
BENCHMARK(bm_distances<kernels::serial::pairwise_sq_distances>)->Name("distances/serial")->Arg(60)->Arg(600);
BENCHMARK(bm_distances<kernels::pairwise_sq_distances>)->Name("distances/parallel")->Arg(60)->Arg(600)->UseRealTime();
BENCHMARK(bm_chain<kernels::serial::chain_extend>)->Name("chain_extend/serial")->Arg(8)->Arg(32);
BENCHMARK(bm_chain<kernels::chain_extend>)->Name("chain_extend/parallel")->Arg(8)->Arg(32)->UseRealTime();

BENCHMARK_MAIN();
