// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "aldfit/class_fit.hpp"
#include "aldfit/tensor_io.hpp"
#include "aldfit/weight_tree.hpp"

namespace aldfit {

/// Drop weights whose standardized log-space residual exceeds `threshold`.
struct ResidualRule {
  double threshold = 3.0;
};

/// Keep only the two terminal-node selections of the sign-split tree.
struct TerminalRule {
  int depth = 3;
  std::size_t min_leaf = 4;
};

using PruneRule = std::variant<ResidualRule, TerminalRule>;

struct PruneMask {
  std::size_t class_index = 0;
  std::vector<bool> keep;
  PruneRule rule;

  std::size_t kept() const noexcept;
  std::size_t dropped() const noexcept { return keep.size() - kept(); }
};

/// Residuals are divided by max(residual_sd, kResidualSdFloor) so that
/// numerically exact fits do not standardize rounding noise.
inline constexpr double kResidualSdFloor = 1e-9;

/// Near-zero weights (excluded from regression) are always kept. Throws
/// MissingFit when a branch with eligible members has no fit, InvalidArgument
/// unless threshold > 0.
PruneMask mask_by_residual(std::span<const float> theta, const ClassFit& fit, double threshold);

/// keep = positive_terminal U negative_terminal.
PruneMask mask_by_terminal(const NeuronSelection& selection, std::size_t num_features,
                           TerminalRule rule = {});

/// Zeroes dropped entries; kept entries are copied bit-for-bit. Throws
/// ShapeMismatch unless there is exactly one mask of length D per class, in
/// class order.
WeightMatrix apply_mask(const WeightMatrix& matrix, std::span<const PruneMask> masks);

}  // namespace aldfit
