#include "resest/decoder.hpp"
#include "resest/grid.hpp"
#include "resest/rng.hpp"
#include "resest/weighted_l1.hpp"

#include <benchmark/benchmark.h>

using namespace resest;

namespace {

WeightedL1Problem random_problem(int n, int m, bool constrained, std::uint64_t seed) {
    Rng rng(seed);
    Matrix h(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        h.col(j) = rng.normal_vector(m);
    }
    const Vector x = rng.normal_vector(n);
    Vector y = h * x + 0.01 * rng.normal_vector(m);
    for (int j = 0; j < m / 5; ++j) {
        y(j) += 5.0;
    }
    WeightedL1Problem p{h, y, {}, std::nullopt, std::nullopt};
    if (constrained) {
        p.prior = EllipsoidConstraint{h * x, Vector::Constant(m, 100.0), 2.0 * m};
        p.noise = EllipsoidConstraint{Vector::Zero(m), Vector::Constant(m, 1e4), 2.0 * m};
    }
    return p;
}

}  // namespace

static void BM_WeightedL1Plain(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const WeightedL1Problem p = random_problem(m / 4, m, false, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_weighted_l1(p));
    }
    state.SetComplexityN(m);
}
BENCHMARK(BM_WeightedL1Plain)->RangeMultiplier(2)->Range(16, 256)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_WeightedL1BothEllipsoids(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const WeightedL1Problem p = random_problem(m / 4, m, true, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_weighted_l1(p));
    }
    state.SetComplexityN(m);
}
BENCHMARK(BM_WeightedL1BothEllipsoids)->RangeMultiplier(2)->Range(16, 256)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_ReweightedIeee14(benchmark::State& state) {
    const MeasurementModel model = build_dc_grid_model(load_grid_spec(RESEST_DATA_DIR "/grids/ieee14_dc.json"));
    Rng rng(3);
    const Vector x = 0.1 * rng.normal_vector(model.states());
    Vector y = model.h() * x + model.noise_std().cwiseProduct(rng.normal_vector(model.measurements()));
    for (int j = 0; j < 10; ++j) {
        y(3 * j) *= 6.0;
    }
    DecoderConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(reweighted_l1(model, y, std::nullopt, cfg));
    }
}
BENCHMARK(BM_ReweightedIeee14)->Unit(benchmark::kMillisecond);

static void BM_LeastSquaresIeee14(benchmark::State& state) {
    const MeasurementModel model = build_dc_grid_model(load_grid_spec(RESEST_DATA_DIR "/grids/ieee14_dc.json"));
    Rng rng(4);
    const Vector y = rng.normal_vector(model.measurements());
    for (auto _ : state) {
        benchmark::DoNotOptimize(least_squares(model.h(), y));
    }
}
BENCHMARK(BM_LeastSquaresIeee14);

BENCHMARK_MAIN();
