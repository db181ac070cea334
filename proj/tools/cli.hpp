// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rectlaw::cli {

/// Runs one command. `args` excludes the program name. Returns the process
/// exit code: 0 success, 1 computational failure, 2 usage or I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rectlaw::cli
