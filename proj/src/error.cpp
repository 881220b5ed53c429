// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#include "aldfit/error.hpp"

namespace aldfit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kInvalidRate: return "InvalidRate";
    case ErrorCode::kAtKink: return "AtKink";
    case ErrorCode::kDegenerateBranch: return "DegenerateBranch";
    case ErrorCode::kConstantBranch: return "ConstantBranch";
    case ErrorCode::kNonPositive: return "NonPositive";
    case ErrorCode::kEmptyVector: return "EmptyVector";
    case ErrorCode::kMissingFit: return "MissingFit";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace aldfit
