// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference vs OpenMP kernels on a synthetic classifier head.
// Arguments are K (classes) and D (features); 1000x512 matches a ResNet-18
// head, 1000x2048 a ResNet-152 head.

#include <benchmark/benchmark.h>

#include <map>
#include <utility>

#include "aldfit/kernels.hpp"

namespace {

const aldfit::AldParams kParams{0.0, 2.0, 1.5};

const aldfit::WeightMatrix& head(std::size_t k, std::size_t d) {
  static std::map<std::pair<std::size_t, std::size_t>, aldfit::WeightMatrix> cache;
  auto it = cache.find({k, d});
  if (it == cache.end()) it = cache.emplace(std::pair{k, d}, aldfit::sample_matrix(kParams, k, d, 1)).first;
  return it->second;
}

template <bool Parallel>
void BM_FitClasses(benchmark::State& state) {
  const auto& m = head(state.range(0), state.range(1));
  const auto classes = aldfit::all_classes(m);
  for (auto _ : state) {
    auto fits = Parallel ? aldfit::fit_classes(m, classes) : aldfit::reference::fit_classes(m, classes);
    benchmark::DoNotOptimize(fits);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.values().size()));
}

template <bool Parallel>
void BM_BuildTrees(benchmark::State& state) {
  const auto& m = head(state.range(0), state.range(1));
  const auto classes = aldfit::all_classes(m);
  for (auto _ : state) {
    auto trees = Parallel ? aldfit::build_trees(m, classes) : aldfit::reference::build_trees(m, classes);
    benchmark::DoNotOptimize(trees);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.values().size()));
}

template <bool Parallel>
void BM_ResidualMasks(benchmark::State& state) {
  const auto& m = head(state.range(0), state.range(1));
  for (auto _ : state) {
    auto masks = Parallel ? aldfit::residual_masks(m, 3.0) : aldfit::reference::residual_masks(m, 3.0);
    benchmark::DoNotOptimize(masks);
  }
}

template <bool Parallel>
void BM_SampleMatrix(benchmark::State& state) {
  for (auto _ : state) {
    auto m = Parallel ? aldfit::sample_matrix(kParams, state.range(0), state.range(1), 7)
                      : aldfit::reference::sample_matrix(kParams, state.range(0), state.range(1), 7);
    benchmark::DoNotOptimize(m);
  }
}

void Shapes(benchmark::internal::Benchmark* b) {
  b->Args({1000, 512})->Args({1000, 2048})->Args({10, 100000})->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_FitClasses<false>)->Name("fit_classes/serial")->Apply(Shapes);
BENCHMARK(BM_FitClasses<true>)->Name("fit_classes/openmp")->Apply(Shapes);
BENCHMARK(BM_BuildTrees<false>)->Name("build_trees/serial")->Apply(Shapes);
BENCHMARK(BM_BuildTrees<true>)->Name("build_trees/openmp")->Apply(Shapes);
BENCHMARK(BM_ResidualMasks<false>)->Name("residual_masks/serial")->Apply(Shapes);
BENCHMARK(BM_ResidualMasks<true>)->Name("residual_masks/openmp")->Apply(Shapes);
BENCHMARK(BM_SampleMatrix<false>)->Name("sample_matrix/serial")->Apply(Shapes);
BENCHMARK(BM_SampleMatrix<true>)->Name("sample_matrix/openmp")->Apply(Shapes);

BENCHMARK_MAIN();
