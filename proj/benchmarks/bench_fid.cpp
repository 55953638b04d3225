#include <benchmark/benchmark.h>

#include "fid/gfd.hpp"
#include "fid/inference.hpp"

using namespace fid;

static void BM_GeometricNumericCdf(benchmark::State& state) {
    ModelSpec lg = make_model(Family::Logarithmic);
    auto g = fiducial_geometric(lg, 10, 12.0, FiducialOptions{false, kDefaultQuadTol});
    std::vector<double> xs;
    for (int i = 1; i < state.range(0); ++i) xs.push_back(static_cast<double>(i) / state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(g->cdf_many(xs));
}
BENCHMARK(BM_GeometricNumericCdf)->Arg(200)->Arg(2000);

static void BM_GfdDensity(benchmark::State& state) {
    ModelSpec te = make_model(Family::TruncatedExponential);
    std::vector<double> x{0.05, 0.95};
    for (auto _ : state) benchmark::DoNotOptimize(gfd_density(te, x));
}
BENCHMARK(BM_GfdDensity);

static void BM_PitGamma(benchmark::State& state) {
    ModelSpec ga = make_model(Family::Gamma, {{"alpha", 2.0}});
    for (auto _ : state) benchmark::DoNotOptimize(pit_uniformity(ga, 5, 1.3, FiducialVariant::Right, 1000, 1));
}
BENCHMARK(BM_PitGamma);

BENCHMARK_MAIN();
