// natcorr_bench.cpp: timings of the hot paths behind region scans, trajectory
// propagation and the exact oracle.

#include <benchmark/benchmark.h>

#include <vector>

#include "natcorr/bath.hpp"
#include "natcorr/corrections.hpp"
#include "natcorr/exact_oracle.hpp"
#include "natcorr/frequency_quadrature.hpp"
#include "natcorr/master_equation.hpp"
#include "natcorr/natural_correlation.hpp"

namespace {

using namespace natcorr;

const LorentzDrude kBath{1.0, 1.0};

const CorrelationKernel& kernel() {
    static const CorrelationKernel k = fit_exponential_mixture(kBath, 30);
    return k;
}

const SystemModel& model() {
    static const SystemModel m = SystemModel::spin_boson(1.0);
    return m;
}

const RedfieldGenerator& generator() {
    static const RedfieldGenerator g = build_redfield_generator(model(), kernel(), 0.5);
    return g;
}

void BM_FitExponentialMixture(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(fit_exponential_mixture(kBath, state.range(0)));
}
BENCHMARK(BM_FitExponentialMixture)->Arg(5)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_CorrelationSeries(benchmark::State& state) {
    double t = 0.37;
    for (auto _ : state) benchmark::DoNotOptimize(lorentz_drude_series(kBath, t));
}
BENCHMARK(BM_CorrelationSeries);

void BM_CorrelationQuadrature(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(lorentz_drude_quadrature(kBath, 1.0));
}
BENCHMARK(BM_CorrelationQuadrature)->Unit(benchmark::kMillisecond);

void BM_BuildGenerator(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(build_redfield_generator(model(), kernel(), 0.5));
}
BENCHMARK(BM_BuildGenerator);

void BM_PropagateMarkovian(benchmark::State& state) {
    std::vector<double> times;
    for (int i = 0; i <= 200; ++i) times.push_back(0.1 * i);
    const DensityMatrix rho = bloch_to_density({1.0, 0.0, 0.0});
    for (auto _ : state) benchmark::DoNotOptimize(propagate_markovian(generator(), rho, times));
}
BENCHMARK(BM_PropagateMarkovian)->Unit(benchmark::kMicrosecond);

void BM_PropagateTcl2(benchmark::State& state) {
    std::vector<double> times;
    for (int i = 0; i <= 200; ++i) times.push_back(0.1 * i);
    const DensityMatrix rho = bloch_to_density({1.0, 0.0, 0.0});
    for (auto _ : state) benchmark::DoNotOptimize(propagate_tcl2(generator(), rho, times, 1.0));
}
BENCHMARK(BM_PropagateTcl2)->Unit(benchmark::kMillisecond);

void BM_DeltaRho1(benchmark::State& state) {
    const ComplexMatrix rho = bloch_to_density({0.3, 0.4, 0.5}).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(delta_rho1(model(), kernel(), 0.5, rho, 2.0));
}
BENCHMARK(BM_DeltaRho1);

void BM_UPrimeMembership(benchmark::State& state) {
    static const VariationalKernel vk(model(), kernel());
    const ComplexMatrix rho = bloch_to_density({0.95, 0.1, 0.0}).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(vk.membership(rho, 0.5));
}
BENCHMARK(BM_UPrimeMembership)->Unit(benchmark::kMicrosecond);

void BM_PositivityProbe(benchmark::State& state) {
    static const PositivityProbe probe(generator());
    const ComplexMatrix rho = bloch_to_density({1.0, 0.0, 0.0}).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(probe.evaluate(rho));
}
BENCHMARK(BM_PositivityProbe)->Unit(benchmark::kMicrosecond);

void BM_RegionScan(benchmark::State& state) {
    const GridSpec grid{static_cast<std::size_t>(state.range(0)), 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(region_scan(generator(), grid, ScanSettings{}));
}
BENCHMARK(BM_RegionScan)->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);

void BM_OracleCancellation(benchmark::State& state) {
    const auto modes = discretize_at_frequencies(LorentzDrude{1.0, 6.0}, {0.6, 1.3, 1.9}, 2.5);
    const ExactOracle oracle(model(), TruncatedBath{modes.modes, 5, 6.0});
    const DensityMatrix rho = bloch_to_density({0.3, 0.4, 0.5});
    const std::vector<double> times{0.6, 1.2, 2.4, 4.8};
    for (auto _ : state) benchmark::DoNotOptimize(cancellation_test(oracle, rho, 0.1, -1, times));
}
BENCHMARK(BM_OracleCancellation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
