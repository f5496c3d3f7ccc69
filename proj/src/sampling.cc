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
#include "varlift/sampling.h"

#include "varlift/errors.h"

namespace varlift {

SampleSpec SampleSpec::grid_of(Box box, int k) {
  SampleSpec spec;
  spec.box = std::move(box);
  spec.grid = k;
  return spec;
}

SampleSpec SampleSpec::random(Box box, int count, std::uint64_t seed) {
  SampleSpec spec;
  spec.box = std::move(box);
  spec.random_count = count;
  spec.seed = seed;
  return spec;
}

Eigen::VectorXd UniformStream::vector(int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = next(lo, hi);
  return v;
}

Eigen::MatrixXd UniformStream::matrix(int rows, int cols, double lo,
                                      double hi) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = next(lo, hi);
  }
  return m;
}

std::vector<Eigen::VectorXd> generate_samples(const SampleSpec& spec) {
  const Box& box = spec.box;
  const int n = box.dim();
  if (n < 1 || box.hi.size() != n) {
    throw DimensionError("sampling box has inconsistent dimension");
  }
  for (int i = 0; i < n; ++i) {
    if (!(box.lo[i] <= box.hi[i])) {
      throw DimensionError("sampling box has lo > hi on axis " +
                           std::to_string(i + 1));
    }
  }

  std::vector<Eigen::VectorXd> out;
  if (spec.random_count) {
    if (*spec.random_count < 1) throw DimensionError("sample count must be >= 1");
    UniformStream rng(spec.seed);
    out.reserve(*spec.random_count);
    for (int s = 0; s < *spec.random_count; ++s) {
      Eigen::VectorXd p(n);
      for (int i = 0; i < n; ++i) p[i] = rng.next(box.lo[i], box.hi[i]);
      out.push_back(std::move(p));
    }
    return out;
  }

  const int k = spec.grid;
  if (k < 1) throw DimensionError("grid size must be >= 1");
  auto coord = [&](int axis, int idx) {
    if (k == 1) return 0.5 * (box.lo[axis] + box.hi[axis]);
    return box.lo[axis] + (box.hi[axis] - box.lo[axis]) * idx / (k - 1);
  };
  std::vector<int> idx(n, 0);
  for (;;) {
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p[i] = coord(i, idx[i]);
    out.push_back(std::move(p));
    int axis = n - 1;
    while (axis >= 0 && ++idx[axis] == k) idx[axis--] = 0;
    if (axis < 0) break;
  }
  return out;
}

}  // namespace varlift
