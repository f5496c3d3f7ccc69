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

// Right-hand sides of the composite systems built from a control-affine
// system  x' = f(x) + sum_j u_j g_j(x),  y_j = h_j(x).
//
// Each composite is available in two assemblies: the coordinate formula
// (the *_rhs functions) and a composition of geometric lifts
// (*_rhs_from_lifts). They agree to rounding.

#include <Eigen/Dense>
#include <vector>

#include "varlift/exprlang.h"
#include "varlift/geometry.h"

namespace varlift::systems {

using expr::SmoothMap;
using geometry::WhitneyState;

class ControlAffineSystem {
 public:
  /// `g` holds the m input vector fields (may be empty); `h` the output
  /// functions. With inputs present, g and h must have equal length.
  ControlAffineSystem(SmoothMap f, std::vector<SmoothMap> g,
                      std::vector<SmoothMap> h);

  /// x' = A x + B u, y = C x.
  static ControlAffineSystem linear(const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& B,
                                    const Eigen::MatrixXd& C);

  int n() const { return f_.dim_in(); }
  int num_inputs() const { return static_cast<int>(g_.size()); }
  int num_outputs() const { return static_cast<int>(h_.size()); }

  const SmoothMap& f() const { return f_; }
  const std::vector<SmoothMap>& g() const { return g_; }
  const std::vector<SmoothMap>& h() const { return h_; }

  /// n x m matrix with columns g_j(x).
  Eigen::MatrixXd input_matrix(const Eigen::VectorXd& x) const;
  /// m x n matrix with rows dh_j/dx(x).
  Eigen::MatrixXd output_jacobian(const Eigen::VectorXd& x) const;
  /// y = h(x).
  Eigen::VectorXd outputs(const Eigen::VectorXd& x) const;
  /// df/dx + sum_j u_j dg_j/dx.
  Eigen::MatrixXd state_jacobian(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u) const;
  /// f(x) + sum_j u_j g_j(x).
  Eigen::VectorXd drift(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;

 private:
  SmoothMap f_;
  std::vector<SmoothMap> g_;
  std::vector<SmoothMap> h_;
};

/// Values on the input/output ports of the prolonged system and the
/// Hamiltonian extension.
struct PortValues {
  Eigen::VectorXd u;
  Eigen::VectorXd du_var;  ///< delta u
  Eigen::VectorXd du_adj;  ///< d u
  Eigen::VectorXd y;
  Eigen::VectorXd dy_var;  ///< delta y
  Eigen::VectorXd dy_adj;  ///< d y
};

struct VariationalRate {
  Eigen::VectorXd dx_dot;
  Eigen::VectorXd dy_var;
};

struct ProlongedRate {
  Eigen::VectorXd x_dot;
  Eigen::VectorXd dx_dot;
  Eigen::VectorXd y;
  Eigen::VectorXd dy_var;
};

struct AdjointRate {
  Eigen::VectorXd p_dot;
  Eigen::VectorXd dy_adj;
};

struct ExtensionRate {
  Eigen::VectorXd x_dot;
  Eigen::VectorXd p_dot;
  Eigen::VectorXd y;
  Eigen::VectorXd dy_adj;
};

struct DiffHamRate {
  WhitneyState z_dot;
  Eigen::VectorXd y;
  /// Internal port values after closing delta u = -dy, du = delta y.
  PortValues ports;
};

VariationalRate variational_rhs(const ControlAffineSystem& sys,
                                const Eigen::VectorXd& x,
                                const Eigen::VectorXd& dx,
                                const Eigen::VectorXd& u,
                                const Eigen::VectorXd& du_var);

ProlongedRate prolonged_rhs(const ControlAffineSystem& sys,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& dx,
                            const Eigen::VectorXd& u,
                            const Eigen::VectorXd& du_var);

/// f^c + sum u_j g_j^c + sum du_j g_j^v with outputs h^v, h^c.
ProlongedRate prolonged_rhs_from_lifts(const ControlAffineSystem& sys,
                                       const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& dx,
                                       const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& du_var);

AdjointRate adjoint_variational_rhs(const ControlAffineSystem& sys,
                                    const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& p,
                                    const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& du_adj);

ExtensionRate hamiltonian_extension_rhs(const ControlAffineSystem& sys,
                                        const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& p,
                                        const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& du_adj);

/// X_{H^f} + sum u_j X_{H^{g_j}} + sum du_j X_{h_j^v} with outputs h^v, H^g.
ExtensionRate hamiltonian_extension_rhs_from_lifts(const ControlAffineSystem& sys,
                                                   const Eigen::VectorXd& x,
                                                   const Eigen::VectorXd& p,
                                                   const Eigen::VectorXd& u,
                                                   const Eigen::VectorXd& du_adj);

/// Prolonged system and Hamiltonian extension interconnected through
/// delta u = -dy, du = delta y.
DiffHamRate diff_hamiltonian_rhs(const ControlAffineSystem& sys,
                                 const WhitneyState& z, const Eigen::VectorXd& u);

/// f^c + X_{H^f} - sum H^{g_j} g_j^v + sum h_j^c X_{h_j^v}
///   + sum u_j (g_j^c + X_{H^{g_j}}).
DiffHamRate diff_hamiltonian_rhs_from_lifts(const ControlAffineSystem& sys,
                                            const WhitneyState& z,
                                            const Eigen::VectorXd& u);

/// Input-free specialization: g must vanish (absent or zero at z.x).
WhitneyState diff_lyapunov_rhs(const ControlAffineSystem& sys,
                               const WhitneyState& z);

}  // namespace varlift::systems
