#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "etamix/inference.h"
#include "etamix/mixing.h"
#include "etamix/montecarlo.h"

namespace etamix {
namespace {

Matrix random_rows(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::exponential_distribution<double> e(1.0);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (auto& v : m.row(r)) s += (v = e(rng));
    for (auto& v : m.row(r)) v /= s;
  }
  return m;
}

// Homogeneous random HMM with 3 hidden and 3 observed symbols.
ProcessModel bench_model(std::size_t n) {
  std::mt19937_64 rng(n);
  ProcessModel m;
  m.n = n;
  m.hidden = Alphabet::Numbered(3);
  m.observed = Alphabet::Numbered(3);
  m.initial = {0.2, 0.3, 0.5};
  m.kernels.assign(n - 1, random_rows(rng, 3, 3));
  m.emissions.assign(n, random_rows(rng, 3, 3));
  return m;
}

void BM_ObservedLawForward(benchmark::State& state) {
  const auto m = bench_model(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(observed_law(m, ObservedLawMethod::kForward));
}
BENCHMARK(BM_ObservedLawForward)->DenseRange(4, 10, 2);

void BM_ObservedLawEnumeration(benchmark::State& state) {
  const auto m = bench_model(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(observed_law(m, ObservedLawMethod::kEnumeration));
}
BENCHMARK(BM_ObservedLawEnumeration)->DenseRange(4, 8, 2);

void BM_EtaBarMatrixBrute(benchmark::State& state) {
  const auto m = bench_model(static_cast<std::size_t>(state.range(0)));
  const auto law = observed_law(m);
  for (auto _ : state) benchmark::DoNotOptimize(eta_bar_matrix(law));
}
BENCHMARK(BM_EtaBarMatrixBrute)->DenseRange(4, 10, 2);

void BM_EtaBarMatrixFiltered(benchmark::State& state) {
  const auto m = bench_model(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eta_bar_matrix_filtered(m));
}
BENCHMARK(BM_EtaBarMatrixFiltered)->DenseRange(4, 10, 2);

void BM_Gamma2Norm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Matrix g = Matrix::Identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g(i, j) = 0.5 / static_cast<double>(j - i);
  for (auto _ : state) benchmark::DoNotOptimize(gamma_2_norm(g));
}
BENCHMARK(BM_Gamma2Norm)->RangeMultiplier(4)->Range(4, 256);

void BM_SampleTrajectories(benchmark::State& state) {
  const auto m = bench_model(8);
  const auto count = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_trajectories(m, count, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleTrajectories)->Arg(10000)->Arg(100000);

}  // namespace
}  // namespace etamix

BENCHMARK_MAIN();
