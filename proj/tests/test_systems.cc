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
#include "doctest.h"
#include "support.h"
#include "varlift/errors.h"
#include "varlift/systems.h"

using namespace varlift;
using namespace varlift::systems;
using testing::mat;
using testing::Mat;
using testing::Vec;
using testing::vec;

namespace {

SmoothMap sm(std::vector<std::string> c, int n) { return SmoothMap::parse(c, n); }
SmoothMap scalar(const std::string& s, int n) { return SmoothMap::parse_scalar(s, n); }

ControlAffineSystem double_integrator() {
  return ControlAffineSystem(sm({"x2", "0"}, 2), {sm({"0", "1"}, 2)}, {scalar("x1", 2)});
}

// Nonlinear corpus with inputs.
std::vector<ControlAffineSystem> nonlinear_corpus() {
  return {
      ControlAffineSystem(sm({"-x1^3"}, 1), {sm({"1 + x1^2"}, 1)}, {scalar("sin(x1)", 1)}),
      ControlAffineSystem(sm({"x2", "-sin(x1) - 0.2*x2"}, 2),
                          {sm({"0", "cos(x1)"}, 2), sm({"x2", "1"}, 2)},
                          {scalar("x1", 2), scalar("x1*x2", 2)}),
      ControlAffineSystem(sm({"x2*x3", "-x1 + x3^2", "-x3 + x1*x2"}, 3),
                          {sm({"1", "x3", "exp(-x1^2)"}, 3)},
                          {scalar("x1 + x2^2 - x3", 3)}),
  };
}

void check_close(const Vec& a, const Vec& b, double tol) {
  REQUIRE(a.size() == b.size());
  CHECK((a - b).lpNorm<Eigen::Infinity>() <= tol);
}

}  // namespace

TEST_CASE("system construction validates dimensions") {
  CHECK_THROWS_AS(ControlAffineSystem(sm({"x1", "x2"}, 2), {sm({"1"}, 1)}, {scalar("x1", 2)}),
                  DimensionError);
  CHECK_THROWS_AS(ControlAffineSystem(sm({"x1"}, 1), {sm({"1"}, 1)}, {}), DimensionError);
  const ControlAffineSystem lyap(sm({"-x1^3"}, 1), {}, {scalar("x1", 1)});
  CHECK(lyap.num_inputs() == 0);
  CHECK(lyap.num_outputs() == 1);
}

TEST_CASE("variational and prolonged examples") {
  const auto di = double_integrator();
  const auto v = variational_rhs(di, vec({1, 2}), vec({0.5, -1}), vec({0}), vec({1}));
  CHECK(v.dx_dot == vec({-1, 1}));
  CHECK(v.dy_var == vec({0.5}));
  const auto z = variational_rhs(di, vec({1, 2}), vec({0, 0}), vec({0.7}), vec({0}));
  CHECK(z.dx_dot.isZero());
  CHECK(z.dy_var.isZero());

  const auto p = prolonged_rhs(di, vec({1, 2}), vec({0.5, -1}), vec({0}), vec({1}));
  CHECK(p.x_dot == vec({2, 0}));
  CHECK(p.dx_dot == vec({-1, 1}));
  CHECK(p.y == vec({1}));
  CHECK(p.dy_var == vec({0.5}));
  const auto b = prolonged_rhs(di, vec({1, 2}), vec({0, 0}), vec({0.3}), vec({0}));
  CHECK(b.x_dot == vec({2, 0.3}));
  CHECK(b.dx_dot.isZero());
}

TEST_CASE("adjoint and extension examples") {
  const auto di = double_integrator();
  const auto a = adjoint_variational_rhs(di, vec({1, 2}), vec({1, 1}), vec({0}), vec({2}));
  CHECK(a.p_dot == vec({-2, -1}));
  CHECK(a.dy_adj == vec({1}));
  const auto z = adjoint_variational_rhs(di, vec({1, 2}), vec({0, 0}), vec({0}), vec({0}));
  CHECK(z.p_dot.isZero());
  CHECK(z.dy_adj.isZero());

  const ControlAffineSystem sc(sm({"-x1"}, 1), {sm({"1"}, 1)}, {scalar("x1", 1)});
  const auto e = hamiltonian_extension_rhs(sc, vec({2}), vec({3}), vec({0}), vec({1}));
  CHECK(e.x_dot == vec({-2}));
  CHECK(e.p_dot == vec({2}));
  CHECK(e.y == vec({2}));
  CHECK(e.dy_adj == vec({3}));
  CHECK(hamiltonian_extension_rhs(sc, vec({2}), vec({0}), vec({0}), vec({0})).p_dot.isZero());
}

TEST_CASE("differential hamiltonian example") {
  const auto di = double_integrator();
  const WhitneyState z(vec({1, 2}), vec({0.5, -1}), vec({1, 1}));
  const auto r = diff_hamiltonian_rhs(di, z, vec({0}));
  CHECK(r.ports.du_var == vec({-1}));
  CHECK(r.ports.du_adj == vec({0.5}));
  CHECK(r.z_dot.dx == vec({-1, -1}));
  CHECK(r.z_dot.p == vec({-0.5, -1}));
  CHECK(r.z_dot.x == vec({2, 0}));
  CHECK(r.y == vec({1}));

  const auto zero = diff_hamiltonian_rhs(
      di, WhitneyState(vec({1, 2}), vec({0, 0}), vec({0, 0})), vec({0.4}));
  CHECK(zero.z_dot.dx.isZero());
  CHECK(zero.z_dot.p.isZero());
}

TEST_CASE("differential lyapunov example") {
  const ControlAffineSystem cubic(sm({"-x1^3"}, 1), {}, {scalar("x1", 1)});
  const auto r = diff_lyapunov_rhs(cubic, WhitneyState(vec({1}), vec({1}), vec({0})));
  CHECK(r.x == vec({-1}));
  CHECK(r.dx == vec({-3}));
  CHECK(r.p == vec({-1}));
  const auto z = diff_lyapunov_rhs(cubic, WhitneyState(vec({1.3}), vec({0}), vec({0})));
  CHECK(z.dx.isZero());
  CHECK(z.p.isZero());

  // Zero input fields are accepted and agree with the full interconnection.
  const ControlAffineSystem zg(sm({"x2", "-x1^3"}, 2), {sm({"0", "0"}, 2)},
                               {scalar("x1*x2", 2)});
  const ControlAffineSystem ng(sm({"x2", "-x1^3"}, 2), {}, {scalar("x1*x2", 2)});
  varlift::UniformStream rng(21);
  for (int k = 0; k < 50; ++k) {
    const WhitneyState s(rng.vector(2, -2, 2), rng.vector(2, -2, 2), rng.vector(2, -2, 2));
    const auto a = diff_lyapunov_rhs(zg, s);
    const auto b = diff_hamiltonian_rhs(zg, s, vec({0})).z_dot;
    const auto c = diff_lyapunov_rhs(ng, s);
    const auto d = diff_hamiltonian_rhs_from_lifts(ng, s, Vec(0)).z_dot;
    check_close(a.dx, b.dx, 1e-13);
    check_close(a.p, b.p, 1e-13);
    check_close(c.p, a.p, 1e-13);
    check_close(d.p, a.p, 1e-13);
  }
  const ControlAffineSystem with_g(sm({"-x1"}, 1), {sm({"1"}, 1)}, {scalar("x1", 1)});
  CHECK_THROWS_AS(diff_lyapunov_rhs(with_g, WhitneyState(vec({1}), vec({1}), vec({1}))),
                  DimensionError);
}

TEST_CASE("lift-assembled and coordinate right-hand sides agree") {
  int idx = 0;
  for (const auto& sys : nonlinear_corpus()) {
    CAPTURE(idx++);
    const int n = sys.n();
    const int m = sys.num_inputs();
    varlift::UniformStream rng(40 + idx);
    for (int k = 0; k < 100; ++k) {
      const Vec x = rng.vector(n, -1.5, 1.5), dx = rng.vector(n, -1, 1),
                p = rng.vector(n, -1, 1), u = rng.vector(m, -1, 1),
                du = rng.vector(m, -1, 1), da = rng.vector(m, -1, 1);
      const auto a = prolonged_rhs(sys, x, dx, u, du);
      const auto b = prolonged_rhs_from_lifts(sys, x, dx, u, du);
      check_close(a.x_dot, b.x_dot, 1e-13);
      check_close(a.dx_dot, b.dx_dot, 1e-12);
      check_close(a.y, b.y, 0);
      check_close(a.dy_var, b.dy_var, 1e-13);

      const auto c = hamiltonian_extension_rhs(sys, x, p, u, da);
      const auto d = hamiltonian_extension_rhs_from_lifts(sys, x, p, u, da);
      check_close(c.x_dot, d.x_dot, 1e-13);
      check_close(c.p_dot, d.p_dot, 1e-12);
      check_close(c.dy_adj, d.dy_adj, 1e-13);

      const WhitneyState z(x, dx, p);
      const auto e = diff_hamiltonian_rhs(sys, z, u);
      const auto f = diff_hamiltonian_rhs_from_lifts(sys, z, u);
      check_close(e.z_dot.x, f.z_dot.x, 1e-13);
      check_close(e.z_dot.dx, f.z_dot.dx, 1e-12);
      check_close(e.z_dot.p, f.z_dot.p, 1e-12);
    }
  }
}

TEST_CASE("pairing balance at the right-hand-side level") {
  for (const auto& sys : nonlinear_corpus()) {
    const int n = sys.n();
    const int m = sys.num_inputs();
    varlift::UniformStream rng(77);
    for (int k = 0; k < 100; ++k) {
      const Vec x = rng.vector(n, -1.5, 1.5), dx = rng.vector(n, -1, 1),
                p = rng.vector(n, -1, 1), u = rng.vector(m, -1, 1),
                dv = rng.vector(m, -1, 1), da = rng.vector(m, -1, 1);
      const auto pr = prolonged_rhs(sys, x, dx, u, dv);
      const auto ar = adjoint_variational_rhs(sys, x, p, u, da);
      const double lhs = p.dot(pr.dx_dot) + ar.p_dot.dot(dx);
      const double rhs = -da.dot(pr.dy_var) + dv.dot(ar.dy_adj);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

      const auto cl = diff_hamiltonian_rhs(sys, WhitneyState(x, dx, p), u);
      const double closed = p.dot(cl.z_dot.dx) + cl.z_dot.p.dot(dx);
      const double expect =
          -cl.ports.dy_var.squaredNorm() - cl.ports.dy_adj.squaredNorm();
      CHECK(closed == doctest::Approx(expect).epsilon(1e-12));
      CHECK(closed <= 1e-14);
    }
  }
}

TEST_CASE("zero section is an equilibrium of the variational part") {
  for (const auto& sys : nonlinear_corpus()) {
    const int n = sys.n();
    const int m = sys.num_inputs();
    varlift::UniformStream rng(5);
    for (int k = 0; k < 20; ++k) {
      const Vec x = rng.vector(n, -1.5, 1.5), u = rng.vector(m, -1, 1);
      const Vec zn = Vec::Zero(n), zm = Vec::Zero(m);
      CHECK(prolonged_rhs(sys, x, zn, u, zm).dx_dot.isZero());
      CHECK(adjoint_variational_rhs(sys, x, zn, u, zm).p_dot.isZero());
      const auto r = diff_hamiltonian_rhs(sys, WhitneyState(x, zn, zn), u);
      CHECK(r.z_dot.dx.isZero());
      CHECK(r.z_dot.p.isZero());
    }
  }
}

TEST_CASE("linear systems reduce to block-matrix forms") {
  varlift::UniformStream rng(2024);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 2 + trial, m = 1 + trial % 2;
    const Mat A = rng.matrix(n, n, -1, 1), B = rng.matrix(n, m, -1, 1),
              C = rng.matrix(m, n, -1, 1);
    const auto sys = ControlAffineSystem::linear(A, B, C);
    Mat H(2 * n, 2 * n);
    H << A, -B * B.transpose(), -C.transpose() * C, -A.transpose();
    for (int k = 0; k < 100; ++k) {
      const Vec x = rng.vector(n, -2, 2), dx = rng.vector(n, -2, 2),
                p = rng.vector(n, -2, 2), u = rng.vector(m, -2, 2),
                dv = rng.vector(m, -2, 2), da = rng.vector(m, -2, 2);
      const double tol = 1e-12;
      const auto pr = prolonged_rhs(sys, x, dx, u, dv);
      check_close(pr.x_dot, A * x + B * u, tol);
      check_close(pr.dx_dot, A * dx + B * dv, tol);
      check_close(pr.y, C * x, tol);
      check_close(pr.dy_var, C * dx, tol);
      const auto ar = adjoint_variational_rhs(sys, x, p, u, da);
      check_close(ar.p_dot, -A.transpose() * p - C.transpose() * da, tol);
      check_close(ar.dy_adj, B.transpose() * p, tol);
      const auto er = hamiltonian_extension_rhs(sys, x, p, u, da);
      check_close(er.x_dot, A * x + B * u, tol);
      check_close(er.p_dot, -A.transpose() * p - C.transpose() * da, tol);
      const auto dh = diff_hamiltonian_rhs(sys, WhitneyState(x, dx, p), u);
      Vec w(2 * n);
      w << dx, p;
      const Vec hw = H * w;
      check_close(dh.z_dot.x, A * x + B * u, tol);
      check_close(dh.z_dot.dx, hw.head(n), tol);
      check_close(dh.z_dot.p, hw.tail(n), tol);
    }
  }
}
