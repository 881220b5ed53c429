// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

// Asymmetric Laplace density with location m, rate lambda and asymmetry
// kappa:
//
//   f(t) = lambda / (kappa + 1/kappa) * exp( (lambda/kappa) * (t - m))   t <  m
//          lambda / (kappa + 1/kappa) * exp(-(lambda*kappa) * (t - m))   t >= m
//
// The right tail decays at lambda*kappa, the left tail at lambda/kappa, and
// the mass below m is kappa^2 / (1 + kappa^2).

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace aldfit {

struct AldParams {
  double m = 0.0;
  double lambda = 1.0;
  double kappa = 1.0;

  /// Throws InvalidParams unless lambda > 0, kappa > 0 and all fields finite.
  void validate() const;

  double right_rate() const noexcept { return lambda * kappa; }
  double left_rate() const noexcept { return lambda / kappa; }
  double left_mass() const noexcept { return kappa * kappa / (1.0 + kappa * kappa); }
};

double ald_pdf(double theta, const AldParams& params);
double ald_log_pdf(double theta, const AldParams& params);

/// d/dtheta log f: lambda/kappa below m, -lambda*kappa above. Throws AtKink at
/// theta == m.
double ald_log_pdf_slope(double theta, const AldParams& params);

struct AldSample {
  AldParams params;
  std::uint64_t seed = 0;
  std::vector<double> values;
};

/// Composition sampler: with probability kappa^2/(1+kappa^2) draw
/// m - E/(lambda/kappa), otherwise m + E/(lambda*kappa), E ~ Exp(1).
/// Output depends only on (params, n, seed).
AldSample ald_sample(const AldParams& params, std::size_t n, std::uint64_t seed);

enum class BranchSign { kPositive, kNegative };
std::string_view to_string(BranchSign sign) noexcept;

/// Raw values on one side of a pivot together with their column indices.
struct Branch {
  std::vector<double> values;
  std::vector<std::size_t> indices;

  std::size_t size() const noexcept { return values.size(); }
};

struct SignSplit {
  Branch positive;  // theta >= pivot
  Branch negative;  // theta <  pivot
};

/// Entries equal to the pivot go to the positive branch.
SignSplit split_by_sign(std::span<const float> theta, double pivot = 0.0);

/// Magnitudes below this are dropped before taking logs.
inline constexpr double kNearZero = 1e-12;

/// A branch reflected to positive magnitudes |value - pivot| and stripped of
/// near-zero entries, ready for regression.
struct ReflectedBranch {
  BranchSign sign = BranchSign::kPositive;
  std::vector<double> magnitudes;
  std::vector<std::size_t> indices;
  std::size_t excluded_near_zero = 0;
};

ReflectedBranch reflect_branch(const Branch& branch, BranchSign sign, double pivot = 0.0);

/// Least-squares line through (x_i, log v_(i)) where v_(i) are the branch
/// magnitudes sorted ascending and x_i = i / (L - 1).
struct BranchFit {
  BranchSign sign = BranchSign::kPositive;
  std::size_t count = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double residual_sd = 0.0;
  std::vector<double> sorted_values;        // ascending magnitudes
  std::vector<std::size_t> member_indices;  // column of each sorted value

  double regressor(std::size_t rank) const noexcept {
    return count > 1 ? static_cast<double>(rank) / static_cast<double>(count - 1) : 0.0;
  }
  double predicted_log(std::size_t rank) const noexcept { return slope * regressor(rank) + intercept; }
  double residual(std::size_t rank) const;
};

/// `indices` may be empty, in which case positions 0..L-1 are used.
/// Throws DegenerateBranch (L < 2), NonPositive (a value <= 0 or non-finite),
/// ConstantBranch (all values equal).
BranchFit fit_branch(std::span<const double> values, BranchSign sign,
                     std::span<const std::size_t> indices = {});
BranchFit fit_branch(const ReflectedBranch& branch);

/// Maximum-likelihood exponential rate 1/mean(values).
double exp_rate_from_branch(const BranchFit& fit, std::span<const double> values);

/// Inverts rate_pos = lambda*kappa, rate_neg = lambda/kappa.
AldParams ald_from_branch_rates(double rate_pos, double rate_neg, double m = 0.0);

}  // namespace aldfit
