#include <benchmark/benchmark.h>

#include <memory>

#include "qedvar/energies.hpp"
#include "qedvar/oracle.hpp"
#include "qedvar/units.hpp"

using namespace qedvar;

namespace {

CavityGeometry cavity(double lambda = 0.2) {
    const double l = units::nm_to_natural(620);
    return CavityGeometry{l, 0.3 * l, lambda};
}

MatterEigensystem emitter(int levels) {
    EmitterSpec spec;
    spec.site_potentials.assign(static_cast<std::size_t>(levels), 0.0);
    return solve_matter(spec);
}

void BM_SolveFrequencies(benchmark::State& state) {
    const auto c = cavity();
    for (auto _ : state) benchmark::DoNotOptimize(solve_frequencies(c, static_cast<std::size_t>(state.range(0))));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveFrequencies)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_Spectrum(benchmark::State& state) {
    const auto matter = emitter(static_cast<int>(state.range(0)));
    const auto modes = solve_frequencies(cavity(), 50);
    for (auto _ : state) benchmark::DoNotOptimize(spectrum(matter, modes));
}
BENCHMARK(BM_Spectrum)->DenseRange(2, 4);

void BM_OracleApply(benchmark::State& state) {
    const auto matter = emitter(2);
    auto basis = std::make_shared<const FockBasis>(2, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const OracleHamiltonian h(basis, matter, cavity());
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(h.dimension()));
    Eigen::VectorXd y(x.size());
    for (auto _ : state) {
        h.apply(std::span<const double>(x.data(), x.size()), std::span<double>(y.data(), y.size()));
        benchmark::ClobberMemory();
    }
    state.counters["states"] = static_cast<double>(h.dimension());
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(h.dimension()));
}
BENCHMARK(BM_OracleApply)->Args({16, 3})->Args({30, 3})->Args({50, 3})->Args({16, 4});

void BM_OracleLowest(benchmark::State& state) {
    const auto matter = emitter(2);
    auto basis = std::make_shared<const FockBasis>(2, 16, 3);
    const OracleHamiltonian h(basis, matter, cavity());
    for (auto _ : state) benchmark::DoNotOptimize(lowest_eigenvalues(h, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_OracleLowest)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
