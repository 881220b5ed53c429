// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#include "aldfit/pruner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aldfit/error.hpp"

namespace aldfit {
namespace {

void drop_outliers(const BranchOutcome& branch, double threshold, std::vector<bool>& keep) {
  if (branch.eligible_count() == 0) return;
  if (!branch.fit) {
    throw Error(ErrorCode::kMissingFit, std::string(to_string(branch.sign)) + " branch has no fit (" +
                                            branch.error_message + ")");
  }
  const BranchFit& fit = *branch.fit;
  const double sd = std::max(fit.residual_sd, kResidualSdFloor);
  for (std::size_t r = 0; r < fit.count; ++r) {
    if (std::abs(fit.residual(r)) / sd > threshold) keep.at(fit.member_indices[r]) = false;
  }
}

}  // namespace

std::size_t PruneMask::kept() const noexcept {
  return static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
}

PruneMask mask_by_residual(std::span<const float> theta, const ClassFit& fit, double threshold) {
  if (!(threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "residual threshold must be > 0");
  }
  PruneMask mask{fit.class_index, std::vector<bool>(theta.size(), true), ResidualRule{threshold}};
  if (std::isinf(threshold)) return mask;
  drop_outliers(fit.positive, threshold, mask.keep);
  drop_outliers(fit.negative, threshold, mask.keep);
  return mask;
}

PruneMask mask_by_terminal(const NeuronSelection& selection, std::size_t num_features, TerminalRule rule) {
  PruneMask mask{selection.class_index, std::vector<bool>(num_features, false), rule};
  for (const auto* terminal : {&selection.positive_terminal, &selection.negative_terminal}) {
    for (std::size_t i : *terminal) {
      if (i >= num_features) {
        throw Error(ErrorCode::kShapeMismatch, "selection index " + std::to_string(i) + " >= D");
      }
      mask.keep[i] = true;
    }
  }
  return mask;
}

WeightMatrix apply_mask(const WeightMatrix& matrix, std::span<const PruneMask> masks) {
  const std::size_t k_classes = matrix.num_classes();
  const std::size_t d = matrix.num_features();
  if (masks.size() != k_classes) {
    throw Error(ErrorCode::kShapeMismatch, std::to_string(masks.size()) + " masks for " +
                                               std::to_string(k_classes) + " classes");
  }
  std::vector<float> values(matrix.values().begin(), matrix.values().end());
  for (std::size_t k = 0; k < k_classes; ++k) {
    if (masks[k].class_index != k) {
      throw Error(ErrorCode::kShapeMismatch, "mask " + std::to_string(k) + " is for class " +
                                                 std::to_string(masks[k].class_index));
    }
    if (masks[k].keep.size() != d) {
      throw Error(ErrorCode::kShapeMismatch, "mask for class " + std::to_string(k) + " has length " +
                                                 std::to_string(masks[k].keep.size()));
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (!masks[k].keep[i]) values[k * d + i] = 0.0f;
    }
  }
  return WeightMatrix(matrix.name(), k_classes, d, std::move(values), matrix.class_labels());
}

}  // namespace aldfit
