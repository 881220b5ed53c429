// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

// Batch kernels over the classes of a weight matrix. The top-level functions
// run one class per OpenMP iteration; the `reference` namespace holds plain
// serial loops with identical results, used by the tests and the benchmark.
// Output is always ordered like `classes`, whatever the schedule.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aldfit/ald.hpp"
#include "aldfit/class_fit.hpp"
#include "aldfit/pruner.hpp"
#include "aldfit/tensor_io.hpp"
#include "aldfit/weight_tree.hpp"

namespace aldfit {

/// Seed used for row k of a synthetic matrix.
std::uint64_t row_seed(std::uint64_t seed, std::size_t k) noexcept;

WeightMatrix sample_matrix(const AldParams& params, std::size_t num_classes, std::size_t num_features,
                           std::uint64_t seed);

std::vector<ClassFit> fit_classes(const WeightMatrix& matrix, std::span<const std::size_t> classes,
                                  const FitOptions& options = {});

std::vector<WeightTreeNode> build_trees(const WeightMatrix& matrix, std::span<const std::size_t> classes,
                                        const TreeOptions& options = {});

std::vector<NeuronSelection> select_classes(const WeightMatrix& matrix, std::span<const std::size_t> classes,
                                            const TreeOptions& options = {});

/// One mask per class of the matrix (all classes). A class whose fit cannot
/// support the residual rule gets an all-keep mask and its index is appended
/// to `unfit` when given.
std::vector<PruneMask> residual_masks(const WeightMatrix& matrix, double threshold,
                                      std::vector<std::size_t>* unfit = nullptr);

std::vector<PruneMask> terminal_masks(const WeightMatrix& matrix, const TerminalRule& rule);

/// All class indices 0..K-1.
std::vector<std::size_t> all_classes(const WeightMatrix& matrix);

namespace reference {

WeightMatrix sample_matrix(const AldParams& params, std::size_t num_classes, std::size_t num_features,
                           std::uint64_t seed);
std::vector<ClassFit> fit_classes(const WeightMatrix& matrix, std::span<const std::size_t> classes,
                                  const FitOptions& options = {});
std::vector<WeightTreeNode> build_trees(const WeightMatrix& matrix, std::span<const std::size_t> classes,
                                        const TreeOptions& options = {});
std::vector<PruneMask> residual_masks(const WeightMatrix& matrix, double threshold,
                                      std::vector<std::size_t>* unfit = nullptr);

}  // namespace reference

int max_threads() noexcept;

}  // namespace aldfit
