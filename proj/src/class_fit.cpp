// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#include "aldfit/class_fit.hpp"

namespace aldfit {
namespace {

BranchOutcome fit_one(const Branch& raw, BranchSign sign, double pivot) {
  BranchOutcome out;
  out.sign = sign;
  out.raw_count = raw.size();
  const ReflectedBranch reflected = reflect_branch(raw, sign, pivot);
  out.excluded_near_zero = reflected.excluded_near_zero;
  try {
    BranchFit fit = fit_branch(reflected);
    out.rate_ml = exp_rate_from_branch(fit, reflected.magnitudes);
    out.fit = std::move(fit);
  } catch (const Error& e) {
    out.error = e.code();
    out.error_message = e.what();
  }
  return out;
}

}  // namespace

ClassFit fit_class(std::span<const float> row, std::size_t class_index, const FitOptions& options) {
  ClassFit result;
  result.class_index = class_index;
  result.location = options.location;
  const SignSplit split = split_by_sign(row, options.location);
  result.positive = fit_one(split.positive, BranchSign::kPositive, options.location);
  result.negative = fit_one(split.negative, BranchSign::kNegative, options.location);
  if (result.positive.rate_ml && result.negative.rate_ml) {
    result.params = ald_from_branch_rates(*result.positive.rate_ml, *result.negative.rate_ml, options.location);
  }
  return result;
}

}  // namespace aldfit
