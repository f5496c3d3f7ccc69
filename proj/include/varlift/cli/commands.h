/*
 Copyright 2026 The varlift Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

// Command implementations behind the `varlift` executable. Each returns the
// text for stdout and stderr and the process exit code: 0 pass, 1 checked
// and failed (or non-converged, blow-up), 2 usage/parse/dimension error.

#include <optional>
#include <string>

#include "varlift/cli/config.h"

namespace varlift::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitError = 2;

struct CommandResult {
  int exit_code = kExitPass;
  std::string out;
  std::string err;
};

/// Flags shared by the commands; unset values fall back to the config, then
/// to defaults (tol 1e-8 for algebraic checks).
struct CommonOptions {
  std::string config_path;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<int> random_count;
  std::optional<std::string> out;
  std::optional<std::string> system;
  std::optional<double> T;
  std::optional<double> dt;
  std::string kind = "right";
  bool skip_input_invariance = false;
};

CommandResult cmd_check(const std::string& which, const CommonOptions& opts);
CommandResult cmd_simulate(const CommonOptions& opts);
CommandResult cmd_solve_lqr(const CommonOptions& opts);
CommandResult cmd_eigsec(const CommonOptions& opts);
/// Writes the built-in configs to `<dir>/<name>.json`, or prints them all
/// as one JSON object when `dir` is unset.
CommandResult cmd_examples(const std::optional<std::string>& dir);

}  // namespace varlift::cli
