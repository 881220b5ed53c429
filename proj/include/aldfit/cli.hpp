// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aldfit::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 2,
  kUsage = 3,
  kNoFittableClasses = 4,
};

/// Entry point behind the `aldfit` binary; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aldfit::cli
