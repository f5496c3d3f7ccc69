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
#include <Eigen/Eigenvalues>
#include <cmath>

#include "doctest.h"
#include "support.h"
#include "varlift/errors.h"
#include "varlift/riccati.h"

using namespace varlift;
using namespace varlift::riccati;
using testing::mat;
using testing::Mat;
using testing::Vec;
using testing::vec;

namespace {

const double kSqrt2 = std::sqrt(2.0);

SmoothMap sm(std::vector<std::string> c, int n) { return SmoothMap::parse(c, n); }
SmoothMap scalar(const std::string& s, int n) { return SmoothMap::parse_scalar(s, n); }

ControlAffineSystem double_integrator() {
  return ControlAffineSystem(sm({"x2", "0"}, 2), {sm({"0", "1"}, 2)}, {scalar("x1", 2)});
}

CareMatrices di_matrices() {
  return {mat({{0, 1}, {0, 0}}), mat({{0}, {1}}), mat({{1, 0}})};
}

Mat di_care() { return mat({{kSqrt2, 1}, {1, kSqrt2}}); }

// Independent CARE oracle: stable invariant subspace of the Hamiltonian
// matrix, P = X2 X1^{-1}.
Mat hamiltonian_care(const CareMatrices& cm) {
  const Eigen::Index n = cm.A.rows();
  Mat H(2 * n, 2 * n);
  H << cm.A, -cm.B * cm.B.transpose(), -cm.C.transpose() * cm.C, -cm.A.transpose();
  Eigen::EigenSolver<Mat> es(H);
  Eigen::MatrixXcd basis(2 * n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    if (es.eigenvalues()[i].real() < 0) basis.col(k++) = es.eigenvectors().col(i);
  }
  REQUIRE(k == n);
  const Eigen::MatrixXcd P = basis.bottomRows(n) * basis.topRows(n).inverse();
  return P.real();
}

std::vector<Vec> box_samples(int n, std::uint64_t seed, double lo = -2, double hi = 2) {
  return testing::random_points(50, n, lo, hi, seed);
}

}  // namespace

TEST_CASE("differential riccati residual examples") {
  const auto di = double_integrator();
  const auto pts = box_samples(2, 1);
  auto r = diff_riccati_residual(di, expr::MetricField::constant(di_care()), pts, 1e-10);
  CHECK(r.pass);
  CHECK(r.max_residual <= 1e-10);
  CHECK(r.check == "riccati");

  r = diff_riccati_residual(di, expr::MetricField::constant(Mat::Zero(2, 2)), pts);
  for (const auto& rec : r.records) CHECK(rec.residual == doctest::Approx(1.0));

  r = diff_riccati_residual(di, expr::MetricField::constant(Mat::Identity(2, 2)), pts);
  CHECK_FALSE(r.pass);
  for (const auto& rec : r.records) CHECK(rec.residual == doctest::Approx(2.0).epsilon(1e-14));
  CHECK((diff_riccati_matrix(di, expr::MetricField::constant(Mat::Identity(2, 2)),
                             vec({0.3, 0.1})) -
         mat({{1, 1}, {1, -1}}))
            .norm() <= 1e-15);
}

TEST_CASE("report bookkeeping") {
  const auto di = double_integrator();
  const auto pi = expr::MetricField::parse_lower({{"1 + x1^2"}, {"0", "1"}}, 2);
  const auto r = diff_riccati_residual(di, pi, box_samples(2, 3), 1e-8);
  double mx = 0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    if (r.records[i].residual > mx) {
      mx = r.records[i].residual;
      arg = i;
    }
  }
  CHECK(r.max_residual == mx);
  CHECK(r.argmax == arg);
  CHECK(r.pass == (r.max_residual <= r.tolerance));
}

TEST_CASE("input invariance residual examples") {
  const auto di = double_integrator();
  CHECK(input_invariance_residual(di, expr::MetricField::constant(di_care()), box_samples(2, 4))
            .max_residual == 0.0);
  const ControlAffineSystem gx(sm({"0"}, 1), {sm({"x1"}, 1)}, {scalar("x1", 1)});
  const auto pts = box_samples(1, 5, 0.5, 2);
  auto r = input_invariance_residual(gx, expr::MetricField::constant(mat({{1}})), pts);
  for (const auto& rec : r.records) CHECK(rec.residual == doctest::Approx(2.0));
  r = input_invariance_residual(gx, expr::MetricField::parse_lower({{"1/x1^2"}}, 1), pts);
  CHECK(r.max_residual <= 1e-14);
}

TEST_CASE("riccati check combines both conditions") {
  const ControlAffineSystem gx(sm({"0"}, 1), {sm({"x1"}, 1)}, {scalar("x1", 1)});
  const auto pi = expr::MetricField::constant(mat({{1}}));
  const auto pts = box_samples(1, 6, 0.5, 2);
  const auto full = riccati_check(gx, pi, pts, 1e-8, true);
  const auto eq3 = riccati_check(gx, pi, pts, 1e-8, false);
  const auto only3 = diff_riccati_residual(gx, pi, pts, 1e-8);
  const auto only4 = input_invariance_residual(gx, pi, pts, 1e-8);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(full.records[i].residual ==
          std::max(only3.records[i].residual, only4.records[i].residual));
    CHECK(eq3.records[i].residual == only3.records[i].residual);
  }
}

TEST_CASE("differential lyapunov residual examples") {
  const ControlAffineSystem cubic(sm({"-x1^3"}, 1), {}, {scalar("x1", 1)});
  const auto pts = box_samples(1, 7, 0.5, 2);
  CHECK(diff_lyapunov_residual(cubic, expr::MetricField::parse_lower({{"1/(4*x1^2)"}}, 1),
                               pts)
            .max_residual <= 1e-10);
  const ControlAffineSystem lin(sm({"-x1"}, 1), {}, {scalar("x1", 1)});
  CHECK(diff_lyapunov_residual(lin, expr::MetricField::constant(mat({{0.5}})), pts)
            .max_residual == 0.0);
  const auto r = diff_lyapunov_residual(lin, expr::MetricField::constant(mat({{0}})), pts);
  for (const auto& rec : r.records) CHECK(rec.residual == 1.0);

  // Agrees with the Riccati residual when there are no inputs.
  const ControlAffineSystem nl(sm({"x2", "-x1 - x1^3 - x2"}, 2), {}, {scalar("x1*x2", 2)});
  const auto pi = expr::MetricField::parse_lower({{"2 + x2^2"}, {"x1", "1 + x1^2"}}, 2);
  const auto samples = box_samples(2, 8);
  const auto a = diff_lyapunov_residual(nl, pi, samples);
  const auto b = diff_riccati_residual(nl, pi, samples);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(a.records[i].residual == doctest::Approx(b.records[i].residual).epsilon(1e-14));
  }
  CHECK_THROWS_AS(diff_lyapunov_residual(double_integrator(),
                                         expr::MetricField::constant(di_care()), samples),
                  DimensionError);
}

TEST_CASE("hjb residual examples") {
  const ControlAffineSystem sc(sm({"-x1"}, 1), {sm({"1"}, 1)}, {scalar("x1", 1)});
  const auto pts = box_samples(1, 9);
  CHECK(hjb_residual(sc, {scalar("(sqrt(2) - 1)*x1^2/2", 1)}, pts).max_residual <= 1e-10);
  const auto r = hjb_residual(sc, {scalar("0", 1)}, pts);
  for (const auto& rec : r.records) {
    CHECK(rec.residual == doctest::Approx(0.5 * rec.point[0] * rec.point[0]));
  }
  CHECK(hjb_residual(double_integrator(),
                     {scalar("0.5*(sqrt(2)*x1^2 + 2*x1*x2 + sqrt(2)*x2^2)", 2)},
                     box_samples(2, 10))
            .max_residual <= 1e-10);
}

TEST_CASE("hjb and riccati agree on quadratic value functions") {
  const auto di = double_integrator();
  const Mat Q = mat({{1.5, 0.25}, {0.25, 0.75}});
  const auto P = scalar("0.5*(1.5*x1^2 + 0.5*x1*x2 + 0.75*x2^2)", 2);
  const Mat R = care_residual(di_matrices(), Q);
  const auto r = hjb_residual(di, {P}, box_samples(2, 11));
  for (const auto& rec : r.records) {
    const double expect = 0.5 * rec.point.dot(R * rec.point);
    CHECK(rec.residual == doctest::Approx(std::abs(expect)).epsilon(1e-10));
  }
}

TEST_CASE("constant metric residual equals the algebraic CARE residual") {
  varlift::UniformStream rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 2 + trial, m = 1 + trial % 2;
    const CareMatrices cm{rng.matrix(n, n, -1, 1), rng.matrix(n, m, -1, 1),
                          rng.matrix(m, n, -1, 1)};
    Mat S = rng.matrix(n, n, -1, 1);
    S = (S + S.transpose()).eval();
    const auto sys = ControlAffineSystem::linear(cm.A, cm.B, cm.C);
    const Mat R = care_residual(cm, S);
    for (const auto& x : testing::random_points(10, n, -2, 2, 3)) {
      CHECK((diff_riccati_matrix(sys, expr::MetricField::constant(S), x) - R).norm() <=
            1e-12);
    }
  }
}

TEST_CASE("solve_care oracles") {
  auto sol = solve_care(di_matrices());
  CHECK((sol.P - di_care()).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(care_residual(di_matrices(), sol.P).norm() <= 1e-10);

  sol = solve_care({mat({{-1}}), mat({{1}}), mat({{1}})});
  CHECK(std::abs(sol.P(0, 0) - (kSqrt2 - 1)) <= 1e-10);
  sol = solve_care({mat({{0}}), mat({{1}}), mat({{1}})});
  CHECK(std::abs(sol.P(0, 0) - 1) <= 1e-10);
}

TEST_CASE("solve_care solutions are symmetric, stabilizing and match the eigenvector oracle") {
  varlift::UniformStream rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 3, m = 1 + trial % 2;
    const CareMatrices cm{rng.matrix(n, n, -2, 2), rng.matrix(n, m, -1, 1),
                          rng.matrix(m, n, -1, 1)};
    CAPTURE(trial);
    const auto sol = solve_care(cm, 1e-10);
    CHECK(sol.residual <= 1e-10);
    CHECK(care_residual(cm, sol.P).norm() <= 1e-10);
    CHECK((sol.P - sol.P.transpose()).norm() <= 1e-12);
    Eigen::EigenSolver<Mat> es(cm.A - cm.B * cm.B.transpose() * sol.P);
    for (Eigen::Index i = 0; i < n; ++i) CHECK(es.eigenvalues()[i].real() < 0);
    CHECK((sol.P - hamiltonian_care(cm)).norm() <= 1e-7 * (1 + sol.P.norm()));
  }
}

TEST_CASE("stabilizing gains and lyapunov solver") {
  CHECK(is_hurwitz(mat({{-1, 5}, {0, -2}})));
  CHECK_FALSE(is_hurwitz(mat({{0, 1}, {0, 0}})));
  CHECK_FALSE(is_hurwitz(mat({{1}})));
  const Mat M = mat({{-1, 2}, {-3, -4}});
  const Mat Q = mat({{2, 1}, {1, 3}});
  const Mat X = solve_lyapunov(M, Q);
  CHECK((M.transpose() * X + X * M + Q).norm() <= 1e-12);

  const auto cm = di_matrices();
  const Mat K = initial_stabilizing_gain(cm);
  CHECK(is_hurwitz(cm.A - cm.B * K));
  CHECK(initial_stabilizing_gain({mat({{-1}}), mat({{1}}), mat({{1}})}).isZero());
  // (A, B) with an uncontrollable unstable mode.
  CHECK_THROWS(solve_care({mat({{1, 0}, {0, 1}}), mat({{1}, {0}}), mat({{1, 1}})}));
}

TEST_CASE("optimal feedback and hessian metric") {
  const ControlAffineSystem sc(sm({"-x1"}, 1), {sm({"1"}, 1)}, {scalar("x1", 1)});
  const auto u = optimal_feedback(sc, {scalar("(sqrt(2) - 1)*x1^2/2", 1)});
  CHECK(u(vec({3}))[0] == doctest::Approx(-(kSqrt2 - 1) * 3));
  CHECK(optimal_feedback(sc, {scalar("7", 1)})(vec({3})).isZero());
  const auto ud = optimal_feedback(
      double_integrator(), {scalar("0.5*(sqrt(2)*x1^2 + 2*x1*x2 + sqrt(2)*x2^2)", 2)});
  CHECK(ud(vec({1, 2}))[0] == doctest::Approx(-(1 + 2 * kSqrt2)));

  const auto q = hessian_metric({scalar("0.5*(2*x1^2 + 2*x1*x2 + 3*x2^2)", 2)});
  CHECK((q(vec({5, -1})) - mat({{2, 1}, {1, 3}})).norm() <= 1e-14);
  const auto h = hessian_metric({scalar("x1^2*x2", 2)});
  CHECK(h(vec({1, 3})) == mat({{6, 2}, {2, 0}}));
  const auto pts = box_samples(2, 12);
  CHECK(geometry::integrability_residual(h, pts, 1e-8).pass);
  const auto wild = hessian_metric({scalar("sin(x1*x2) + exp(x1)*x2^3 + ln(5 + x1^2)", 2)});
  CHECK(geometry::integrability_residual(wild, pts, 1e-8).pass);
}
