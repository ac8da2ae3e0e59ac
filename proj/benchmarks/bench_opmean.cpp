// Microbenchmarks for the hot paths: spectral decomposition, operator-mean
// evaluation (closed-form vs measure-form generators), divergence evaluation,
// and each barycenter solver at desk scale. Not part of the test suite.

#include <benchmark/benchmark.h>

#include "opmean/barycenter.hpp"
#include "opmean/divergence.hpp"
#include "opmean/hermitian.hpp"
#include "opmean/mean.hpp"
#include "opmean/measure.hpp"

using namespace opmean;

namespace {

SpdMatrix make_spd(int dim, std::uint64_t seed) { return random_spd(dim, 25.0, seed); }

WeightedEnsemble make_ensemble(std::size_t m, int dim, std::uint64_t seed) {
    std::vector<SpdMatrix> mats;
    mats.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        mats.push_back(make_spd(dim, seed + i));
    }
    return WeightedEnsemble::equal_weights(std::move(mats));
}

void bm_eigendecompose(benchmark::State& state) {
    const SpdMatrix a = make_spd(static_cast<int>(state.range(0)), 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eigen_decompose(a.hermitian()));
    }
}
BENCHMARK(bm_eigendecompose)->Arg(4)->Arg(8);

void bm_mean_closed_form(benchmark::State& state) {
    const SpdMatrix a = make_spd(6, 1);
    const SpdMatrix b = make_spd(6, 2);
    const MeanDescriptor sigma = MeanDescriptor::heinz(0.25);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mean(sigma, a, b));
    }
}
BENCHMARK(bm_mean_closed_form);

void bm_mean_measure_form(benchmark::State& state) {
    const SpdMatrix a = make_spd(6, 1);
    const SpdMatrix b = make_spd(6, 2);
    const MeanDescriptor sigma = MeanDescriptor::from_measure(
        GeneratorMeasure::jacobi_power_family(0.5, 64), "jacobi:0.5:64");
    for (auto _ : state) {
        benchmark::DoNotOptimize(mean(sigma, a, b));
    }
}
BENCHMARK(bm_mean_measure_form);

void bm_distance_rtm(benchmark::State& state) {
    const SpdMatrix a = make_spd(6, 1);
    const SpdMatrix b = make_spd(6, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(d_rtm(a, b));
    }
}
BENCHMARK(bm_distance_rtm);

void bm_phi_mu(benchmark::State& state) {
    const SpdMatrix a = make_spd(6, 1);
    const SpdMatrix b = make_spd(6, 2);
    const GeneratorMeasure mu = GeneratorMeasure::jacobi_power_family(0.5, 64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(phi_mu(mu, a, b));
    }
}
BENCHMARK(bm_phi_mu);

void bm_karcher(benchmark::State& state) {
    const WeightedEnsemble ensemble = make_ensemble(4, 4, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(karcher_mean(ensemble));
    }
}
BENCHMARK(bm_karcher);

void bm_bw(benchmark::State& state) {
    const WeightedEnsemble ensemble = make_ensemble(4, 4, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bw_barycenter(ensemble));
    }
}
BENCHMARK(bm_bw);

void bm_hellinger(benchmark::State& state) {
    const WeightedEnsemble ensemble = make_ensemble(4, 4, 7);
    const GeneratorMeasure mu = GeneratorMeasure::jacobi_power_family(0.5, 32);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hellinger_barycenter(mu, ensemble));
    }
}
BENCHMARK(bm_hellinger);

void bm_sigma(benchmark::State& state) {
    const WeightedEnsemble ensemble = make_ensemble(4, 4, 7);
    const MeanDescriptor sigma = MeanDescriptor::geometric(0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ka_barycenter(sigma, ensemble));
    }
}
BENCHMARK(bm_sigma);

} // namespace

BENCHMARK_MAIN();
