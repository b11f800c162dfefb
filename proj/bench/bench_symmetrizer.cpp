#include "qfock/symmetrizer.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

std::vector<double> random_block(int d, int k) {
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(qfock::checked_pow(d, k));
    for (auto& x : v) x = u(rng);
    return v;
}

void BM_PqNaive(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const int k = static_cast<int>(state.range(1));
    const auto in = random_block(d, k);
    std::vector<double> out(in.size());
    for (auto _ : state) {
        qfock::apply_pq_block_naive(d, k, 0.7, in, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_PqFast(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const int k = static_cast<int>(state.range(1));
    const auto in = random_block(d, k);
    std::vector<double> out(in.size());
    for (auto _ : state) {
        qfock::apply_pq_block(d, k, 0.7, in, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_GramReference(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(qfock::gram_matrix_reference(k, 3, 0.7).matrix().data());
}

void BM_GramParallel(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(qfock::gram_matrix(k, 3, 0.7).matrix().data());
}

}  // namespace

BENCHMARK(BM_PqNaive)->ArgsProduct({{2, 3}, {3, 4, 5, 6, 7}});
BENCHMARK(BM_PqFast)->ArgsProduct({{2, 3}, {3, 4, 5, 6, 7, 8, 9, 10}});
BENCHMARK(BM_GramReference)->DenseRange(2, 5);
BENCHMARK(BM_GramParallel)->DenseRange(2, 6);

BENCHMARK_MAIN();
