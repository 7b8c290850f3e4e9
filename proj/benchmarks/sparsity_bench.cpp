#include "resest/measurement_model.hpp"
#include "resest/rng.hpp"
#include "resest/sparsity.hpp"

#include <benchmark/benchmark.h>

using namespace resest;

namespace {

Matrix random_q2t(int m, int n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix h(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        h.col(j) = rng.normal_vector(m);
    }
    return residual_projector(qr_split(h));
}

}  // namespace

// Exact check, one-dimensional nullspace: sorting only.
static void BM_NspExactDim1(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const Matrix a = random_q2t(m, 1, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(nsp_check(a, m / 4, 0.9, 1));
    }
}
BENCHMARK(BM_NspExactDim1)->Arg(12)->Arg(54)->Arg(200);

// Exact vertex enumeration over supports; grows with C(m, k).
static void BM_NspExactVertex(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const Matrix a = random_q2t(12, 3, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(nsp_check(a, k, 1.0, 1));
    }
}
BENCHMARK(BM_NspExactVertex)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

static void BM_NspSampled(benchmark::State& state) {
    const Matrix a = random_q2t(54, 13, 3);
    NspOptions opts;
    opts.samples = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(nsp_sampled_falsifier(a, 5, 1.0, 1, opts));
    }
}
BENCHMARK(BM_NspSampled)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_RipExact(benchmark::State& state) {
    const Matrix a = random_q2t(14, 2, 4);
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(rip_exact(a, k));
    }
}
BENCHMARK(BM_RipExact)->DenseRange(1, 4);

BENCHMARK_MAIN();
