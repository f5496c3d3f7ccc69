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
#include "varlift/systems.h"

#include <optional>
#include <string>

#include "varlift/errors.h"

namespace varlift::systems {

using expr::Expr;
using geometry::CotangentState;
using geometry::TangentState;

namespace {

void require_dim(const Eigen::VectorXd& v, int expected, const char* what) {
  if (v.size() != expected) {
    throw DimensionError(std::string(what) + " has dimension " +
                         std::to_string(v.size()) + ", expected " +
                         std::to_string(expected));
  }
}

Expr linear_form(const Eigen::RowVectorXd& coeffs) {
  std::optional<Expr> sum;
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
    if (coeffs[j] == 0.0) continue;
    Expr term = Expr::binary(Expr::Kind::kMul, Expr::number(coeffs[j]),
                             Expr::var(static_cast<int>(j)));
    sum = sum ? Expr::binary(Expr::Kind::kAdd, *sum, term) : term;
  }
  return sum.value_or(Expr::number(0.0));
}

#ifndef NDEBUG
void cross_check(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                 const char* what) {
  const double scale = 1.0 + std::max(a.lpNorm<Eigen::Infinity>(),
                                      b.lpNorm<Eigen::Infinity>());
  if ((a - b).lpNorm<Eigen::Infinity>() > 1e-9 * scale) {
    throw Error(std::string("coordinate and lift assemblies disagree: ") + what);
  }
}
#endif

}  // namespace

ControlAffineSystem::ControlAffineSystem(SmoothMap f, std::vector<SmoothMap> g,
                                         std::vector<SmoothMap> h)
    : f_(std::move(f)), g_(std::move(g)), h_(std::move(h)) {
  const int n = f_.dim_in();
  if (f_.dim_out() != n) throw DimensionError("f must map R^n to R^n");
  for (std::size_t j = 0; j < g_.size(); ++j) {
    if (g_[j].dim_in() != n || g_[j].dim_out() != n) {
      throw DimensionError("g_" + std::to_string(j + 1) +
                           " must map R^n to R^n");
    }
  }
  for (std::size_t j = 0; j < h_.size(); ++j) {
    if (h_[j].dim_in() != n || h_[j].dim_out() != 1) {
      throw DimensionError("h_" + std::to_string(j + 1) +
                           " must be a scalar function on R^n");
    }
  }
  if (!g_.empty() && g_.size() != h_.size()) {
    throw DimensionError("system has " + std::to_string(g_.size()) +
                         " inputs but " + std::to_string(h_.size()) +
                         " outputs");
  }
}

ControlAffineSystem ControlAffineSystem::linear(const Eigen::MatrixXd& A,
                                                const Eigen::MatrixXd& B,
                                                const Eigen::MatrixXd& C) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || B.rows() != n || C.cols() != n) {
    throw DimensionError("linear system matrices have inconsistent shapes");
  }
  std::vector<Expr> fs;
  for (int i = 0; i < n; ++i) fs.push_back(linear_form(A.row(i)));
  std::vector<SmoothMap> g;
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    g.push_back(SmoothMap::constant(B.col(j), n));
  }
  std::vector<SmoothMap> h;
  for (Eigen::Index i = 0; i < C.rows(); ++i) {
    h.push_back(SmoothMap(n, {linear_form(C.row(i))}));
  }
  return ControlAffineSystem(SmoothMap(n, std::move(fs)), std::move(g),
                             std::move(h));
}

Eigen::MatrixXd ControlAffineSystem::input_matrix(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd G(n(), num_inputs());
  for (int j = 0; j < num_inputs(); ++j) G.col(j) = g_[j](x);
  return G;
}

Eigen::MatrixXd ControlAffineSystem::output_jacobian(
    const Eigen::VectorXd& x) const {
  Eigen::MatrixXd H(num_outputs(), n());
  for (int j = 0; j < num_outputs(); ++j) H.row(j) = expr::jacobian(h_[j], x);
  return H;
}

Eigen::VectorXd ControlAffineSystem::outputs(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(num_outputs());
  for (int j = 0; j < num_outputs(); ++j) y[j] = h_[j](x)[0];
  return y;
}

Eigen::MatrixXd ControlAffineSystem::state_jacobian(
    const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  require_dim(u, num_inputs(), "u");
  Eigen::MatrixXd J = expr::jacobian(f_, x);
  for (int j = 0; j < num_inputs(); ++j) {
    if (u[j] != 0.0) J += u[j] * expr::jacobian(g_[j], x);
  }
  return J;
}

Eigen::VectorXd ControlAffineSystem::drift(const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& u) const {
  require_dim(u, num_inputs(), "u");
  Eigen::VectorXd v = f_(x);
  for (int j = 0; j < num_inputs(); ++j) {
    if (u[j] != 0.0) v += u[j] * g_[j](x);
  }
  return v;
}

VariationalRate variational_rhs(const ControlAffineSystem& sys,
                                const Eigen::VectorXd& x,
                                const Eigen::VectorXd& dx,
                                const Eigen::VectorXd& u,
                                const Eigen::VectorXd& du_var) {
  require_dim(x, sys.n(), "x");
  require_dim(dx, sys.n(), "dx");
  require_dim(du_var, sys.num_inputs(), "delta u");
  VariationalRate r;
  r.dx_dot = sys.state_jacobian(x, u) * dx;
  if (sys.num_inputs() > 0) r.dx_dot += sys.input_matrix(x) * du_var;
  r.dy_var = sys.output_jacobian(x) * dx;
  return r;
}

ProlongedRate prolonged_rhs(const ControlAffineSystem& sys,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& dx,
                            const Eigen::VectorXd& u,
                            const Eigen::VectorXd& du_var) {
  VariationalRate var = variational_rhs(sys, x, dx, u, du_var);
  ProlongedRate r{sys.drift(x, u), std::move(var.dx_dot), sys.outputs(x),
                  std::move(var.dy_var)};
#ifndef NDEBUG
  const ProlongedRate l = prolonged_rhs_from_lifts(sys, x, dx, u, du_var);
  cross_check(r.x_dot, l.x_dot, "prolonged x_dot");
  cross_check(r.dx_dot, l.dx_dot, "prolonged dx_dot");
  cross_check(r.dy_var, l.dy_var, "prolonged delta y");
#endif
  return r;
}

ProlongedRate prolonged_rhs_from_lifts(const ControlAffineSystem& sys,
                                       const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& dx,
                                       const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& du_var) {
  require_dim(u, sys.num_inputs(), "u");
  require_dim(du_var, sys.num_inputs(), "delta u");
  const TangentState s(x, dx);
  TangentState rate = geometry::complete_lift_vf(sys.f())(s);
  for (int j = 0; j < sys.num_inputs(); ++j) {
    const TangentState gc = geometry::complete_lift_vf(sys.g()[j])(s);
    const TangentState gv = geometry::vertical_lift_vf(sys.g()[j])(s);
    rate.x += u[j] * gc.x + du_var[j] * gv.x;
    rate.dx += u[j] * gc.dx + du_var[j] * gv.dx;
  }
  ProlongedRate r{rate.x, rate.dx, Eigen::VectorXd(sys.num_outputs()),
                  Eigen::VectorXd(sys.num_outputs())};
  for (int j = 0; j < sys.num_outputs(); ++j) {
    r.y[j] = geometry::vertical_lift_fn(sys.h()[j])(s);
    r.dy_var[j] = geometry::complete_lift_fn(sys.h()[j])(s);
  }
  return r;
}

AdjointRate adjoint_variational_rhs(const ControlAffineSystem& sys,
                                    const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& p,
                                    const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& du_adj) {
  require_dim(x, sys.n(), "x");
  require_dim(p, sys.n(), "p");
  require_dim(du_adj, sys.num_outputs(), "du");
  AdjointRate r;
  r.p_dot = -sys.state_jacobian(x, u).transpose() * p -
            sys.output_jacobian(x).transpose() * du_adj;
  r.dy_adj = sys.input_matrix(x).transpose() * p;
  return r;
}

ExtensionRate hamiltonian_extension_rhs(const ControlAffineSystem& sys,
                                        const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& p,
                                        const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& du_adj) {
  AdjointRate adj = adjoint_variational_rhs(sys, x, p, u, du_adj);
  ExtensionRate r{sys.drift(x, u), std::move(adj.p_dot), sys.outputs(x),
                  std::move(adj.dy_adj)};
#ifndef NDEBUG
  const ExtensionRate l =
      hamiltonian_extension_rhs_from_lifts(sys, x, p, u, du_adj);
  cross_check(r.x_dot, l.x_dot, "extension x_dot");
  cross_check(r.p_dot, l.p_dot, "extension p_dot");
  cross_check(r.dy_adj, l.dy_adj, "extension dy");
#endif
  return r;
}

ExtensionRate hamiltonian_extension_rhs_from_lifts(
    const ControlAffineSystem& sys, const Eigen::VectorXd& x,
    const Eigen::VectorXd& p, const Eigen::VectorXd& u,
    const Eigen::VectorXd& du_adj) {
  require_dim(u, sys.num_inputs(), "u");
  require_dim(du_adj, sys.num_outputs(), "du");
  const CotangentState s(x, p);
  CotangentState rate = geometry::complete_hamiltonian_lift(sys.f())(s);
  for (int j = 0; j < sys.num_inputs(); ++j) {
    const CotangentState xg = geometry::complete_hamiltonian_lift(sys.g()[j])(s);
    rate.x += u[j] * xg.x;
    rate.p += u[j] * xg.p;
  }
  for (int j = 0; j < sys.num_outputs(); ++j) {
    const CotangentState xh = geometry::vertical_hamiltonian_lift(sys.h()[j])(s);
    rate.x += du_adj[j] * xh.x;
    rate.p += du_adj[j] * xh.p;
  }
  ExtensionRate r{rate.x, rate.p, Eigen::VectorXd(sys.num_outputs()),
                  Eigen::VectorXd(sys.num_inputs())};
  for (int j = 0; j < sys.num_outputs(); ++j) {
    r.y[j] = geometry::vertical_lift_fn(sys.h()[j])(s);
  }
  for (int j = 0; j < sys.num_inputs(); ++j) {
    r.dy_adj[j] = geometry::hamiltonian_function(sys.g()[j])(s);
  }
  return r;
}

DiffHamRate diff_hamiltonian_rhs(const ControlAffineSystem& sys,
                                 const WhitneyState& z,
                                 const Eigen::VectorXd& u) {
  require_dim(z.x, sys.n(), "z.x");
  require_dim(u, sys.num_inputs(), "u");
  PortValues ports;
  ports.u = u;
  ports.dy_adj = sys.input_matrix(z.x).transpose() * z.p;
  ports.dy_var = sys.output_jacobian(z.x) * z.dx;
  ports.du_var = -ports.dy_adj;
  ports.du_adj = ports.dy_var;

  const ProlongedRate pr = prolonged_rhs(sys, z.x, z.dx, u, ports.du_var);
  const ExtensionRate er =
      hamiltonian_extension_rhs(sys, z.x, z.p, u, ports.du_adj);
  ports.y = pr.y;
  DiffHamRate r{WhitneyState(pr.x_dot, pr.dx_dot, er.p_dot), pr.y,
                std::move(ports)};
#ifndef NDEBUG
  const DiffHamRate l = diff_hamiltonian_rhs_from_lifts(sys, z, u);
  cross_check(r.z_dot.dx, l.z_dot.dx, "diffham dx_dot");
  cross_check(r.z_dot.p, l.z_dot.p, "diffham p_dot");
#endif
  return r;
}

DiffHamRate diff_hamiltonian_rhs_from_lifts(const ControlAffineSystem& sys,
                                            const WhitneyState& z,
                                            const Eigen::VectorXd& u) {
  require_dim(u, sys.num_inputs(), "u");
  const TangentState ts = z.tangent();
  const CotangentState cs = z.cotangent();
  WhitneyState rate = geometry::whitney_combine(
      geometry::complete_lift_vf(sys.f()),
      geometry::complete_hamiltonian_lift(sys.f()))(z);

  for (int j = 0; j < sys.num_inputs(); ++j) {
    // Closing the loop weights g_j^v by delta u_j = -H^{g_j} and X_{h_j^v}
    // by du_j = h_j^c. Both parts have zero base component.
    const double dy_adj = geometry::hamiltonian_function(sys.g()[j])(cs);
    const double dy_var = geometry::complete_lift_fn(sys.h()[j])(ts);
    const WhitneyState vert = geometry::whitney_join(
        geometry::vertical_lift_vf(sys.g()[j])(ts),
        geometry::vertical_hamiltonian_lift(sys.h()[j])(cs));
    rate.dx -= dy_adj * vert.dx;
    rate.p += dy_var * vert.p;

    if (u[j] != 0.0) {
      const WhitneyState gc = geometry::whitney_combine(
          geometry::complete_lift_vf(sys.g()[j]),
          geometry::complete_hamiltonian_lift(sys.g()[j]))(z);
      rate.x += u[j] * gc.x;
      rate.dx += u[j] * gc.dx;
      rate.p += u[j] * gc.p;
    }
  }
  if (sys.num_inputs() == 0) {
    for (int j = 0; j < sys.num_outputs(); ++j) {
      const double dy_var = geometry::complete_lift_fn(sys.h()[j])(ts);
      rate.p += dy_var * geometry::vertical_hamiltonian_lift(sys.h()[j])(cs).p;
    }
  }

  DiffHamRate r;
  r.y = sys.outputs(z.x);
  r.ports.u = u;
  r.ports.y = r.y;
  r.ports.dy_adj = sys.input_matrix(z.x).transpose() * z.p;
  r.ports.dy_var = sys.output_jacobian(z.x) * z.dx;
  r.ports.du_var = -r.ports.dy_adj;
  r.ports.du_adj = r.ports.dy_var;
  r.z_dot = std::move(rate);
  return r;
}

WhitneyState diff_lyapunov_rhs(const ControlAffineSystem& sys,
                               const WhitneyState& z) {
  require_dim(z.x, sys.n(), "z.x");
  for (int j = 0; j < sys.num_inputs(); ++j) {
    if (sys.g()[j](z.x).lpNorm<Eigen::Infinity>() != 0.0 ||
        expr::jacobian(sys.g()[j], z.x).lpNorm<Eigen::Infinity>() != 0.0) {
      throw DimensionError("diff_lyapunov_rhs: input field g_" +
                           std::to_string(j + 1) + " is nonzero");
    }
  }
  const Eigen::MatrixXd J = expr::jacobian(sys.f(), z.x);
  const Eigen::MatrixXd H = sys.output_jacobian(z.x);
  return WhitneyState(sys.f()(z.x), J * z.dx,
                      -J.transpose() * z.p - H.transpose() * (H * z.dx));
}

}  // namespace varlift::systems
