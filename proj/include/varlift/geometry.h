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

// Lifts of functions and vector fields to the tangent bundle, the cotangent
// bundle and their Whitney sum, together with pointwise checks built on Lie
// derivatives (eigen-sections, Lagrangian and integrable subbundles, graph
// invariance).
//
// A single global chart R^n is assumed. One-forms are stored as column
// vectors of components. Vector fields on a bundle are returned in the same
// coordinates as the points they act on: a TangentState value (a, b) read as
// a rate means a on the base and b on the fiber.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "varlift/exprlang.h"
#include "varlift/report.h"

namespace varlift::geometry {

using expr::MatrixMap;
using expr::MetricField;
using expr::SmoothMap;

/// Point (x, dx) of TX.
struct TangentState {
  Eigen::VectorXd x;
  Eigen::VectorXd dx;

  TangentState() = default;
  TangentState(Eigen::VectorXd x_, Eigen::VectorXd dx_);
};

/// Point (x, p) of T*X.
struct CotangentState {
  Eigen::VectorXd x;
  Eigen::VectorXd p;

  CotangentState() = default;
  CotangentState(Eigen::VectorXd x_, Eigen::VectorXd p_);
};

/// Point (x, dx, p) of the Whitney sum TX + T*X.
struct WhitneyState {
  Eigen::VectorXd x;
  Eigen::VectorXd dx;
  Eigen::VectorXd p;

  WhitneyState() = default;
  WhitneyState(Eigen::VectorXd x_, Eigen::VectorXd dx_, Eigen::VectorXd p_);

  TangentState tangent() const { return {x, dx}; }
  CotangentState cotangent() const { return {x, p}; }
};

using TangentFn = std::function<double(const TangentState&)>;
using TangentField = std::function<TangentState(const TangentState&)>;
using CotangentFn = std::function<double(const CotangentState&)>;
using CotangentField = std::function<CotangentState(const CotangentState&)>;
using WhitneyField = std::function<WhitneyState(const WhitneyState&)>;

/// h^c(x, dx) = dh(x) dx.
TangentFn complete_lift_fn(const SmoothMap& h);

/// h^v = h composed with the bundle projection; usable on either bundle.
class VerticalLiftFn {
 public:
  explicit VerticalLiftFn(SmoothMap h);
  double operator()(const TangentState& s) const;
  double operator()(const CotangentState& s) const;

 private:
  SmoothMap h_;
};
VerticalLiftFn vertical_lift_fn(const SmoothMap& h);

/// f^c(x, dx) = (f(x), df/dx(x) dx).
TangentField complete_lift_vf(const SmoothMap& f);

/// f^v(x, dx) = (0, f(x)).
TangentField vertical_lift_vf(const SmoothMap& f);

/// H^f(x, p) = p^T f(x).
CotangentFn hamiltonian_function(const SmoothMap& f);

/// X_{H^f}(x, p) = (f(x), -(df/dx)^T(x) p).
CotangentField complete_hamiltonian_lift(const SmoothMap& f);

/// X_{h^v}(x, p) = (0, -dh/dx^T(x)).
CotangentField vertical_hamiltonian_lift(const SmoothMap& h);

/// Joins a tangent-bundle rate and a cotangent-bundle rate at the same base
/// point. Throws DimensionError unless the base components are identical.
WhitneyState whitney_join(const TangentState& tangent_rate,
                          const CotangentState& cotangent_rate);

/// Vector field on TX + T*X from a pair of lifts with a common base part.
WhitneyField whitney_combine(TangentField tangent, CotangentField cotangent);

/// [f, X](x) = dX/dx f - df/dx X.
Eigen::VectorXd lie_bracket(const SmoothMap& f, const SmoothMap& X,
                            const Eigen::VectorXd& x);

/// L_f alpha(x) = (df/dx)^T alpha + d(alpha)/dx f, alpha as a column.
Eigen::VectorXd lie_derivative_oneform(const SmoothMap& f,
                                       const SmoothMap& alpha,
                                       const Eigen::VectorXd& x);

enum class SectionKind { kRight, kLeft };

struct EigenSectionResult {
  std::vector<double> gamma;  ///< least-squares gamma per sample
  ResidualReport report;      ///< ||L_f S - gamma S|| per sample
};

/// Checks L_f S = gamma S (right: S a vector field) or L_f S = gamma S for a
/// one-form (left), estimating gamma pointwise by projection onto S.
/// Throws DimensionError if S vanishes at a sample.
EigenSectionResult eigen_section_check(const SmoothMap& f, const SmoothMap& S,
                                       SectionKind kind,
                                       const std::vector<Eigen::VectorXd>& samples,
                                       double tol);

/// Representation K(x) = {(dx, p) | V(x) p = U(x) dx}.
struct SubbundleUV {
  MatrixMap U;
  MatrixMap V;
};

/// Relative singular-value cutoff of the rank test on [U V].
inline constexpr double kRankCutoff = 1e-9;

/// Per sample: residual = ||V U^T - U V^T||_F, detail "sigma_ratio" =
/// sigma_min/sigma_max of [U V] and "rank_ok". Pass iff every residual is
/// within tol and every rank test succeeds.
ResidualReport lagrangian_check(const SubbundleUV& K,
                                const std::vector<Eigen::VectorXd>& samples,
                                double tol);

/// Per sample: max over (i, j, k) of |d pi_jk/dx_i - d pi_ik/dx_j|.
ResidualReport integrability_residual(const MetricField& pi,
                                      const std::vector<Eigen::VectorXd>& samples,
                                      double tol);

/// The matrix (dv/dx)^T Pi + Pi dv/dx + dPi/dx . v at x.
Eigen::MatrixXd graph_invariance_matrix(const MetricField& pi,
                                        const SmoothMap& v,
                                        const Eigen::VectorXd& x);

/// Per sample: Frobenius norm of graph_invariance_matrix. Zero everywhere
/// iff the graph p = Pi(x) dx is invariant under v.
ResidualReport graph_invariance_residual(
    const MetricField& pi, const SmoothMap& v,
    const std::vector<Eigen::VectorXd>& samples, double tol = 1e-8);

}  // namespace varlift::geometry
