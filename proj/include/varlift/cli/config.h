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

// JSON system description consumed by the command-line tool.
//
//   {
//     "n": 2, "m": 1,
//     "f": ["x2", "0"],
//     "g": [["0", "1"]],            // m lists of n expressions, optional
//     "h": ["x1"],                  // m expressions
//     "Pi": [["sqrt(2)"], ["1", "sqrt(2)"]],   // lower triangle, optional
//     "P": "0.5*x1^2",              // optional
//     "U": [[...]], "V": [[...]],   // n x n grids, optional
//     "section": ["1", "0"],        // optional
//     "domain": [[-2, 2], [-2, 2]],
//     "samples": {"random": 50, "seed": 7} | {"grid": 5},
//     "x0": [...], "dx0": [...], "p0": [...],
//     "input": {"kind": "constant", "values": [0.3]},
//     "T": 5, "dt": 0.001,
//     "A": [[...]], "B": [[...]], "C": [[...]]   // explicit linear data
//   }

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "varlift/errors.h"
#include "varlift/exprlang.h"
#include "varlift/geometry.h"
#include "varlift/sampling.h"
#include "varlift/sim.h"
#include "varlift/systems.h"

namespace varlift::cli {

/// Missing or malformed configuration field. `field()` names the key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error("config field '" + field + "': " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct InputSpec {
  std::string kind = "constant";
  std::vector<double> times;
  std::vector<std::vector<double>> values;
};

using Grid = std::vector<std::vector<std::string>>;

struct SystemConfig {
  int n = 0;
  int m = 0;
  std::optional<std::vector<std::string>> f;
  Grid g;
  std::vector<std::string> h;
  std::optional<Grid> Pi;
  std::optional<std::string> P;
  std::optional<Grid> U;
  std::optional<Grid> V;
  std::optional<std::vector<std::string>> section;
  std::optional<Box> domain;
  std::optional<int> grid;
  std::optional<int> random_count;
  std::uint64_t seed = 0;
  std::optional<Eigen::VectorXd> x0, dx0, p0;
  std::optional<InputSpec> input, du_var, du_adj;
  std::optional<double> T, dt;
  std::optional<Eigen::MatrixXd> A, B, C;
};

/// Validates shapes and expression syntax. Throws ConfigError or ParseError.
SystemConfig parse_config(const nlohmann::json& j);
SystemConfig load_config(const std::string& path);

/// Canonical echo of the configuration after parsing: expressions are
/// re-emitted in canonical form and sampling is fully resolved.
nlohmann::json resolved_config(const SystemConfig& cfg);

systems::ControlAffineSystem build_system(const SystemConfig& cfg);
expr::MetricField build_metric(const SystemConfig& cfg);
expr::SmoothMap build_potential(const SystemConfig& cfg);
geometry::SubbundleUV build_subbundle(const SystemConfig& cfg);
expr::SmoothMap build_section(const SystemConfig& cfg);
SampleSpec build_samples(const SystemConfig& cfg);
sim::InputSignal build_input(const std::optional<InputSpec>& spec, int channels,
                             const char* field);

/// Built-in corpus: double_integrator, scalar_linear, cubic, rotation.
std::map<std::string, nlohmann::json> builtin_examples();

}  // namespace varlift::cli
