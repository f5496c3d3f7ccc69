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
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "varlift/cli/commands.h"

namespace {

using varlift::cli::CommandResult;
using varlift::cli::CommonOptions;

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config_path, "System description (JSON)");
  sub->add_option("--tol", o.tol, "Pass tolerance");
  sub->add_option("--seed", o.seed, "Sampling seed");
  auto* grid = sub->add_option("--grid", o.grid, "Grid points per axis");
  auto* random = sub->add_option("--random", o.random_count, "Random sample count");
  grid->excludes(random);
  sub->add_option("--out", o.out, "Output path");
  sub->add_option("--system", o.system, "base | prolonged | extension | diffham | difflyap");
  sub->add_option("--T", o.T, "Final time");
  sub->add_option("--dt", o.dt, "Step size");
}

int emit(const CommandResult& r) {
  std::fwrite(r.out.data(), 1, r.out.size(), stdout);
  std::fwrite(r.err.data(), 1, r.err.size(), stderr);
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational and Hamiltonian lifts of control systems"};
  app.set_version_flag("--version", "varlift 0.1.0");

  std::optional<std::string> examples_dir;
  bool examples = false;
  app.add_flag("--examples", examples, "Print the built-in example configs");
  app.add_option("--examples-dir", examples_dir,
                 "Write the built-in example configs into this directory");

  CommonOptions check_opts, sim_opts, lqr_opts, eig_opts;
  std::string which;
  auto* check = app.add_subcommand("check", "Residual checks over sample points");
  check->add_option("which", which,
                    "riccati | input-invariance | lyapunov | hjb | integrability | lagrangian")
      ->required();
  add_common(check, check_opts);
  check->add_flag("--no-input-invariance", check_opts.skip_input_invariance,
                  "riccati: skip the input-invariance condition");

  auto* simulate = app.add_subcommand("simulate", "Integrate a lifted system");
  add_common(simulate, sim_opts);
  auto* lqr = app.add_subcommand("solve-lqr", "Solve the algebraic Riccati equation");
  add_common(lqr, lqr_opts);
  auto* eigsec = app.add_subcommand("eigsec", "Eigen-section check");
  add_common(eigsec, eig_opts);
  eigsec->add_option("--kind", eig_opts.kind, "right | left");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : varlift::cli::kExitError;
  }

  if (examples || examples_dir) return emit(varlift::cli::cmd_examples(examples_dir));
  if (check->parsed()) return emit(varlift::cli::cmd_check(which, check_opts));
  if (simulate->parsed()) return emit(varlift::cli::cmd_simulate(sim_opts));
  if (lqr->parsed()) return emit(varlift::cli::cmd_solve_lqr(lqr_opts));
  if (eigsec->parsed()) return emit(varlift::cli::cmd_eigsec(eig_opts));
  std::cerr << app.help();
  return varlift::cli::kExitError;
}
