// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#include "aldfit/ald.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "aldfit/error.hpp"

namespace aldfit {

void AldParams::validate() const {
  if (!(lambda > 0.0) || !(kappa > 0.0) || !std::isfinite(lambda) || !std::isfinite(kappa) ||
      !std::isfinite(m)) {
    throw Error(ErrorCode::kInvalidParams, "need finite m and lambda, kappa > 0 (got m=" +
                                               std::to_string(m) + " lambda=" + std::to_string(lambda) +
                                               " kappa=" + std::to_string(kappa) + ")");
  }
}

double ald_log_pdf(double theta, const AldParams& params) {
  params.validate();
  const double log_norm = std::log(params.lambda) - std::log(params.kappa + 1.0 / params.kappa);
  const double d = theta - params.m;
  return d < 0.0 ? log_norm + params.left_rate() * d : log_norm - params.right_rate() * d;
}

double ald_pdf(double theta, const AldParams& params) { return std::exp(ald_log_pdf(theta, params)); }

double ald_log_pdf_slope(double theta, const AldParams& params) {
  params.validate();
  if (theta == params.m) throw Error(ErrorCode::kAtKink, "score undefined at theta == m");
  return theta < params.m ? params.left_rate() : -params.right_rate();
}

AldSample ald_sample(const AldParams& params, std::size_t n, std::uint64_t seed) {
  params.validate();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");

  // Uniforms are built from raw 64-bit words rather than std:: distributions
  // so that streams are identical across standard library implementations.
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double p_left = params.left_mass();

  AldSample sample{params, seed, {}};
  sample.values.resize(n);
  for (auto& v : sample.values) {
    const bool left = uniform() < p_left;
    const double e = -std::log1p(-uniform());
    v = left ? params.m - e / params.left_rate() : params.m + e / params.right_rate();
  }
  return sample;
}

std::string_view to_string(BranchSign sign) noexcept {
  return sign == BranchSign::kPositive ? "positive" : "negative";
}

SignSplit split_by_sign(std::span<const float> theta, double pivot) {
  SignSplit split;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double v = theta[i];
    Branch& b = v >= pivot ? split.positive : split.negative;
    b.values.push_back(v);
    b.indices.push_back(i);
  }
  return split;
}

ReflectedBranch reflect_branch(const Branch& branch, BranchSign sign, double pivot) {
  ReflectedBranch out;
  out.sign = sign;
  out.magnitudes.reserve(branch.size());
  out.indices.reserve(branch.size());
  for (std::size_t i = 0; i < branch.size(); ++i) {
    const double mag = std::abs(branch.values[i] - pivot);
    if (mag < kNearZero) {
      ++out.excluded_near_zero;
      continue;
    }
    out.magnitudes.push_back(mag);
    out.indices.push_back(branch.indices[i]);
  }
  return out;
}

double BranchFit::residual(std::size_t rank) const {
  return std::log(sorted_values.at(rank)) - predicted_log(rank);
}

BranchFit fit_branch(std::span<const double> values, BranchSign sign,
                     std::span<const std::size_t> indices) {
  const std::size_t n = values.size();
  if (n < 2) throw Error(ErrorCode::kDegenerateBranch, "branch has " + std::to_string(n) + " members");
  if (!indices.empty() && indices.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "indices and values differ in length");
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kNonPositive, "regression input " + std::to_string(v) + " is not > 0");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable so equal magnitudes keep column order and the fit is reproducible.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  if (values[order.front()] == values[order.back()]) {
    throw Error(ErrorCode::kConstantBranch, "all " + std::to_string(n) + " values are equal");
  }

  BranchFit fit;
  fit.sign = sign;
  fit.count = n;
  fit.sorted_values.resize(n);
  fit.member_indices.resize(n);
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    fit.sorted_values[r] = values[order[r]];
    fit.member_indices[r] = indices.empty() ? order[r] : indices[order[r]];
    y[r] = std::log(fit.sorted_values[r]);
  }

  const double x_mean = 0.5;
  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double dx = fit.regressor(r) - x_mean;
    const double dy = y[r] - y_mean;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(syy > 0.0)) throw Error(ErrorCode::kConstantBranch, "log values have zero variance");

  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;

  double ss_res = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double e = y[r] - fit.predicted_log(r);
    ss_res += e * e;
  }
  fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  fit.residual_sd = n > 2 ? std::sqrt(ss_res / static_cast<double>(n - 2)) : 0.0;
  return fit;
}

BranchFit fit_branch(const ReflectedBranch& branch) {
  return fit_branch(branch.magnitudes, branch.sign, branch.indices);
}

double exp_rate_from_branch(const BranchFit& fit, std::span<const double> values) {
  if (fit.count < 2 || values.size() < 2) {
    throw Error(ErrorCode::kDegenerateBranch, "rate needs at least 2 values");
  }
  double sum = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw Error(ErrorCode::kNonPositive, "rate input " + std::to_string(v) + " is not > 0");
    sum += v;
  }
  return static_cast<double>(values.size()) / sum;
}

AldParams ald_from_branch_rates(double rate_pos, double rate_neg, double m) {
  if (!(rate_pos > 0.0) || !(rate_neg > 0.0) || !std::isfinite(rate_pos) || !std::isfinite(rate_neg)) {
    throw Error(ErrorCode::kInvalidRate, "rates must be finite and > 0 (got " + std::to_string(rate_pos) +
                                             ", " + std::to_string(rate_neg) + ")");
  }
  AldParams p{m, std::sqrt(rate_pos * rate_neg), std::sqrt(rate_pos / rate_neg)};
  p.validate();
  return p;
}

}  // namespace aldfit
