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

// Reference computations used by the tests. Everything here works from
// plain double evaluations so it is independent of the dual-number code.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "varlift/exprlang.h"
#include "varlift/sampling.h"

namespace testing {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecFn = std::function<Vec(const Vec&)>;
using ScalarFn = std::function<double(const Vec&)>;

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) out[i++] = e;
  return out;
}

inline Mat mat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Mat out(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double e : row) out(i, j++) = e;
    ++i;
  }
  return out;
}

inline VecFn as_fn(const varlift::expr::SmoothMap& m) {
  return [m](const Vec& x) { return m(x); };
}

inline ScalarFn as_scalar(const varlift::expr::SmoothMap& m) {
  return [m](const Vec& x) { return m(x)[0]; };
}

/// Central differences, step h per coordinate.
inline Mat fd_jacobian(const VecFn& f, const Vec& x, double h = 1e-5) {
  const Vec f0 = f(x);
  Mat J(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vec a = x, b = x;
    a[j] += h;
    b[j] -= h;
    J.col(j) = (f(a) - f(b)) / (2 * h);
  }
  return J;
}

inline Vec fd_gradient(const ScalarFn& s, const Vec& x, double h = 1e-5) {
  return fd_jacobian([&](const Vec& y) { return vec({s(y)}); }, x, h).row(0).transpose();
}

inline Mat fd_hessian(const ScalarFn& s, const Vec& x, double h = 1e-4) {
  const Eigen::Index n = x.size();
  Mat H(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Vec pp = x, pm = x, mp = x, mm = x;
      pp[i] += h; pp[j] += h;
      pm[i] += h; pm[j] -= h;
      mp[i] -= h; mp[j] += h;
      mm[i] -= h; mm[j] -= h;
      H(i, j) = (s(pp) - s(pm) - s(mp) + s(mm)) / (4 * h * h);
    }
  }
  return H;
}

/// Directional derivative of a matrix-valued function along v.
inline Mat fd_matrix_directional(const std::function<Mat(const Vec&)>& M,
                                 const Vec& x, const Vec& v, double h = 1e-5) {
  return (M(x + h * v) - M(x - h * v)) / (2 * h);
}

inline std::vector<Vec> random_points(int count, int n, double lo, double hi,
                                      std::uint64_t seed) {
  varlift::UniformStream rng(seed);
  std::vector<Vec> out;
  for (int k = 0; k < count; ++k) out.push_back(rng.vector(n, lo, hi));
  return out;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace testing
