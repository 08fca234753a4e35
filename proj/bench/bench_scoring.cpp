// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "chebdea/dea.hpp"
#include "chebdea/second_stage.hpp"
#include "chebdea/synth.hpp"

namespace {

using namespace chebdea;

Panel synthetic_panel(std::size_t n) {
  SynthConfig config;
  config.seed = 42;
  config.n_units = n;
  return preprocess(generate_panel(config).records).panel;
}

void BM_ScoreAllSerial(benchmark::State& state) {
  const auto panel = synthetic_panel(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_all_serial(panel, ReturnsToScale::Variable, ScoringMethod::Linear));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScoreAllParallel(benchmark::State& state) {
  const auto panel = synthetic_panel(static_cast<std::size_t>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_all(panel, ReturnsToScale::Variable, ScoringMethod::Linear, threads));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<double> kde_sample(std::size_t n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(1.0, 0.3);
  std::vector<double> out(n);
  for (auto& v : out) v = gauss(rng);
  return out;
}

std::vector<double> kde_grid(std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) grid[k] = -1.0 + 4.0 * static_cast<double>(k) / (points - 1);
  return grid;
}

void BM_KdeSerial(benchmark::State& state) {
  const auto sample = kde_sample(static_cast<std::size_t>(state.range(0)));
  const auto grid = kde_grid(2048);
  const double h = silverman_bandwidth(sample);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_kde_serial(sample, grid, h));
}

void BM_KdeParallel(benchmark::State& state) {
  const auto sample = kde_sample(static_cast<std::size_t>(state.range(0)));
  const auto grid = kde_grid(2048);
  const double h = silverman_bandwidth(sample);
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_kde(sample, grid, h, threads));
}

}  // namespace

BENCHMARK(BM_ScoreAllSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreAllParallel)->Args({500, 0})->Args({2000, 0})->Args({2000, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KdeSerial)->Arg(4660)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KdeParallel)->Args({4660, 0})->Args({4660, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
