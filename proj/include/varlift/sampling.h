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
#include <random>
#include <vector>

namespace varlift {

/// Axis-aligned sampling box [lo_i, hi_i].
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }
};

struct SampleSpec {
  Box box;
  /// Points per axis for a tensor grid; used when `random_count` is unset.
  int grid = 5;
  std::optional<int> random_count;
  std::uint64_t seed = 0;

  static SampleSpec grid_of(Box box, int k);
  static SampleSpec random(Box box, int count, std::uint64_t seed);
};

/// Sample points in a fixed order: lexicographic for grids, generation order
/// for random draws. Random draws are reproducible across platforms.
std::vector<Eigen::VectorXd> generate_samples(const SampleSpec& spec);

/// Uniform doubles in [0, 1) from a seeded mt19937_64. The engine sequence is
/// fixed by the standard and the mapping to doubles is ours, so streams are
/// identical on every platform (std::uniform_real_distribution is not).
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }
  Eigen::VectorXd vector(int n, double lo, double hi);
  Eigen::MatrixXd matrix(int rows, int cols, double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace varlift
