// Copyright 2026 The mot_hijack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mothijack::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitValidation = 2,
  kExitInfeasible = 3,
  kExitBudgetExhausted = 4,
};

/// Environment variable naming the default output directory.
inline constexpr char const* kOutDirEnv = "MOTHIJACK_OUT";
inline constexpr char const* kDefaultOutDir = "mothijack-out";

/// Runs the command line `args` (without the program name). Diagnostics go
/// to `err`, human summaries to `out`.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace mothijack::cli
