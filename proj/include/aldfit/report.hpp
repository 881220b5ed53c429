// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "aldfit/class_fit.hpp"
#include "aldfit/pruner.hpp"
#include "aldfit/tensor_io.hpp"
#include "aldfit/weight_tree.hpp"

namespace aldfit {

inline constexpr const char* kToolName = "aldfit";
inline constexpr const char* kToolVersion = "0.1.0";

using ordered_json = nlohmann::ordered_json;

std::string sha256_hex(std::span<const std::uint8_t> bytes);

std::optional<std::string> class_label(const WeightMatrix& matrix, std::size_t k);

/// RMS of the log-space residuals in `bands` equal-width slices of x.
std::vector<double> residual_rms_by_band(const BranchFit& fit, std::size_t bands = 4);

ordered_json fit_report_json(const WeightMatrix& matrix, std::span<const ClassFit> fits,
                             const std::string& input_digest);

ordered_json selection_to_json(const NeuronSelection& selection, const std::optional<std::string>& label);
NeuronSelection selection_from_json(const nlohmann::json& j);

ordered_json tree_to_json(const WeightTreeNode& node);

ordered_json mask_report_json(const WeightMatrix& matrix, const PruneRule& rule, std::span<const PruneMask> masks,
                              std::span<const std::size_t> unfit_classes);

// Plot output mirrors the usual quantile figure: for each branch the points
// (x_i, log v_(i)) plus the fitted line, x in [0, 1].
inline constexpr int kSvgWidth = 800;
inline constexpr int kSvgHeight = 600;
inline constexpr std::size_t kSvgMaxPointsPerBranch = 2000;

std::string render_fit_svg(const WeightMatrix& matrix, std::span<const ClassFit> fits);
std::string fit_points_csv(const WeightMatrix& matrix, std::span<const ClassFit> fits);

}  // namespace aldfit
