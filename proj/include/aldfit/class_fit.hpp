// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "aldfit/ald.hpp"
#include "aldfit/error.hpp"

namespace aldfit {

struct FitOptions {
  double location = 0.0;  // pivot of the sign split and the reported m
};

/// One sign branch of a class row. Failures are recorded, not thrown.
struct BranchOutcome {
  BranchSign sign = BranchSign::kPositive;
  std::size_t raw_count = 0;  // members before near-zero exclusion
  std::size_t excluded_near_zero = 0;
  std::optional<BranchFit> fit;
  std::optional<double> rate_ml;
  std::optional<ErrorCode> error;
  std::string error_message;

  std::size_t eligible_count() const noexcept { return raw_count - excluded_near_zero; }
};

struct ClassFit {
  std::size_t class_index = 0;
  double location = 0.0;
  BranchOutcome positive;
  BranchOutcome negative;
  std::optional<AldParams> params;  // needs both branch rates

  bool any_branch_fitted() const noexcept { return positive.fit || negative.fit; }
};

/// Sign split, reflection, per-branch regression and ML rates, then the
/// combined (m, lambda, kappa) when both branches produced a rate.
ClassFit fit_class(std::span<const float> row, std::size_t class_index, const FitOptions& options = {});

}  // namespace aldfit
