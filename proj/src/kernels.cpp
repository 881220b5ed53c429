// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#include "aldfit/kernels.hpp"

#include <exception>
#include <numeric>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aldfit/error.hpp"

namespace aldfit {
namespace {

// Runs body(i) for i in [0, n) across threads. Exceptions cannot cross an
// OpenMP region, so the first one is stored and rethrown afterwards.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr failure;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(aldfit_parallel_for_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

template <typename Body>
void serial_for(std::size_t n, Body&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

void check_classes(const WeightMatrix& matrix, std::span<const std::size_t> classes) {
  for (std::size_t k : classes) {
    if (k >= matrix.num_classes()) {
      throw Error(ErrorCode::kInvalidArgument, "class " + std::to_string(k) + " out of range (K=" +
                                                   std::to_string(matrix.num_classes()) + ")");
    }
  }
}

template <typename For>
WeightMatrix sample_matrix_impl(For&& for_each, const AldParams& params, std::size_t num_classes,
                                std::size_t num_features, std::uint64_t seed) {
  params.validate();
  if (num_classes < 1 || num_features < 2) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic matrix needs K >= 1 and D >= 2");
  }
  std::vector<float> values(num_classes * num_features);
  for_each(num_classes, [&](std::size_t k) {
    const AldSample s = ald_sample(params, num_features, row_seed(seed, k));
    for (std::size_t i = 0; i < num_features; ++i) values[k * num_features + i] = static_cast<float>(s.values[i]);
  });
  return WeightMatrix("synthetic", num_classes, num_features, std::move(values));
}

template <typename For>
std::vector<ClassFit> fit_classes_impl(For&& for_each, const WeightMatrix& matrix,
                                       std::span<const std::size_t> classes, const FitOptions& options) {
  check_classes(matrix, classes);
  std::vector<ClassFit> out(classes.size());
  for_each(classes.size(), [&](std::size_t j) { out[j] = fit_class(matrix.row(classes[j]), classes[j], options); });
  return out;
}

template <typename For>
std::vector<WeightTreeNode> build_trees_impl(For&& for_each, const WeightMatrix& matrix,
                                             std::span<const std::size_t> classes, const TreeOptions& options) {
  check_classes(matrix, classes);
  options.validate();
  std::vector<WeightTreeNode> out(classes.size());
  for_each(classes.size(), [&](std::size_t j) { out[j] = build_tree(matrix.row(classes[j]), options); });
  return out;
}

template <typename For>
std::vector<PruneMask> residual_masks_impl(For&& for_each, const WeightMatrix& matrix, double threshold,
                                           std::vector<std::size_t>* unfit) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::kInvalidArgument, "residual threshold must be > 0");
  const std::size_t k_classes = matrix.num_classes();
  std::vector<PruneMask> out(k_classes);
  std::vector<char> failed(k_classes, 0);
  for_each(k_classes, [&](std::size_t k) {
    const auto row = matrix.row(k);
    const ClassFit fit = fit_class(row, k);
    try {
      out[k] = mask_by_residual(row, fit, threshold);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMissingFit) throw;
      out[k] = PruneMask{k, std::vector<bool>(row.size(), true), ResidualRule{threshold}};
      failed[k] = 1;
    }
  });
  if (unfit) {
    for (std::size_t k = 0; k < k_classes; ++k) {
      if (failed[k]) unfit->push_back(k);
    }
  }
  return out;
}

const auto kParallel = [](std::size_t n, auto&& body) { parallel_for(n, body); };
const auto kSerial = [](std::size_t n, auto&& body) { serial_for(n, body); };

}  // namespace

std::uint64_t row_seed(std::uint64_t seed, std::size_t k) noexcept {
  // splitmix64 finalizer over (seed, k) so neighbouring rows are decorrelated.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(k) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::size_t> all_classes(const WeightMatrix& matrix) {
  std::vector<std::size_t> out(matrix.num_classes());
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

WeightMatrix sample_matrix(const AldParams& params, std::size_t num_classes, std::size_t num_features,
                           std::uint64_t seed) {
  return sample_matrix_impl(kParallel, params, num_classes, num_features, seed);
}

std::vector<ClassFit> fit_classes(const WeightMatrix& matrix, std::span<const std::size_t> classes,
                                  const FitOptions& options) {
  return fit_classes_impl(kParallel, matrix, classes, options);
}

std::vector<WeightTreeNode> build_trees(const WeightMatrix& matrix, std::span<const std::size_t> classes,
                                        const TreeOptions& options) {
  return build_trees_impl(kParallel, matrix, classes, options);
}

std::vector<NeuronSelection> select_classes(const WeightMatrix& matrix, std::span<const std::size_t> classes,
                                            const TreeOptions& options) {
  const auto trees = build_trees(matrix, classes, options);
  std::vector<NeuronSelection> out(trees.size());
  for (std::size_t j = 0; j < trees.size(); ++j) out[j] = select_neurons(trees[j], classes[j]);
  return out;
}

std::vector<PruneMask> residual_masks(const WeightMatrix& matrix, double threshold,
                                      std::vector<std::size_t>* unfit) {
  return residual_masks_impl(kParallel, matrix, threshold, unfit);
}

std::vector<PruneMask> terminal_masks(const WeightMatrix& matrix, const TerminalRule& rule) {
  const auto classes = all_classes(matrix);
  const auto selections = select_classes(matrix, classes, TreeOptions{rule.depth, rule.min_leaf});
  std::vector<PruneMask> out;
  out.reserve(selections.size());
  for (const auto& sel : selections) out.push_back(mask_by_terminal(sel, matrix.num_features(), rule));
  return out;
}

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace reference {

WeightMatrix sample_matrix(const AldParams& params, std::size_t num_classes, std::size_t num_features,
                           std::uint64_t seed) {
  return sample_matrix_impl(kSerial, params, num_classes, num_features, seed);
}

std::vector<ClassFit> fit_classes(const WeightMatrix& matrix, std::span<const std::size_t> classes,
                                  const FitOptions& options) {
  return fit_classes_impl(kSerial, matrix, classes, options);
}

std::vector<WeightTreeNode> build_trees(const WeightMatrix& matrix, std::span<const std::size_t> classes,
                                        const TreeOptions& options) {
  return build_trees_impl(kSerial, matrix, classes, options);
}

std::vector<PruneMask> residual_masks(const WeightMatrix& matrix, double threshold,
                                      std::vector<std::size_t>* unfit) {
  return residual_masks_impl(kSerial, matrix, threshold, unfit);
}

}  // namespace reference
}  // namespace aldfit
