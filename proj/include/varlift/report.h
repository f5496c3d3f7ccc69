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

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace varlift {

struct ResidualRecord {
  Eigen::VectorXd point;
  double residual = 0.0;
  /// Named auxiliary quantities (per-term residuals, gamma estimates, ...).
  std::vector<std::pair<std::string, double>> details;
};

/// Per-sample residual norms produced by every pointwise checker.
struct ResidualReport {
  std::string check;
  std::vector<ResidualRecord> records;
  double max_residual = 0.0;
  std::size_t argmax = 0;
  bool pass = true;
  double tolerance = 0.0;
  std::optional<std::uint64_t> seed;

  const Eigen::VectorXd& argmax_point() const {
    return records.at(argmax).point;
  }
};

/// Fills max_residual/argmax from the records and sets pass to
/// (max_residual <= tolerance) && extra_condition.
inline void finalize(ResidualReport& report, bool extra_condition = true) {
  report.max_residual = 0.0;
  report.argmax = 0;
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    if (report.records[i].residual > report.max_residual) {
      report.max_residual = report.records[i].residual;
      report.argmax = i;
    }
  }
  report.pass = report.max_residual <= report.tolerance && extra_condition;
}

}  // namespace varlift
