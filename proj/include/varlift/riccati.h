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

// Residuals of the generalized differential Riccati equation, the
// input-invariance condition, the differential Lyapunov equation and the
// HJB equation; Newton-Kleinman solution of the algebraic Riccati equation
//   A^T P + P A - P B B^T P + C^T C = 0.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "varlift/exprlang.h"
#include "varlift/report.h"
#include "varlift/systems.h"

namespace varlift::riccati {

using expr::MetricField;
using expr::SmoothMap;
using systems::ControlAffineSystem;

struct CareMatrices {
  Eigen::MatrixXd A;  ///< n x n
  Eigen::MatrixXd B;  ///< n x m
  Eigen::MatrixXd C;  ///< m x n (any number of rows)
};

/// Scalar generating function P on R^n (value function candidate).
struct GeneratingFunction {
  SmoothMap P;
};

/// (df/dx)^T Pi + Pi df/dx - Pi g g^T Pi + (dh/dx)^T dh/dx + dPi/dx . f at x.
Eigen::MatrixXd diff_riccati_matrix(const ControlAffineSystem& sys,
                                    const MetricField& pi,
                                    const Eigen::VectorXd& x);

ResidualReport diff_riccati_residual(const ControlAffineSystem& sys,
                                     const MetricField& pi,
                                     const std::vector<Eigen::VectorXd>& samples,
                                     double tol = 1e-8);

/// Per sample: max over j of the graph invariance residual of g_j, with the
/// per-input values as details "g1", "g2", ...
ResidualReport input_invariance_residual(
    const ControlAffineSystem& sys, const MetricField& pi,
    const std::vector<Eigen::VectorXd>& samples, double tol = 1e-8);

/// Riccati residual combined with the input-invariance residual: per sample
/// the larger of the two, both kept as details. With
/// `include_input_invariance == false` this is diff_riccati_residual.
ResidualReport riccati_check(const ControlAffineSystem& sys,
                             const MetricField& pi,
                             const std::vector<Eigen::VectorXd>& samples,
                             double tol, bool include_input_invariance = true);

/// Input-free variant without the quadratic term. Throws DimensionError if an
/// input field is nonzero at a sample.
ResidualReport diff_lyapunov_residual(const ControlAffineSystem& sys,
                                      const MetricField& pi,
                                      const std::vector<Eigen::VectorXd>& samples,
                                      double tol = 1e-8);

/// |dP/dx f - 1/2 dP/dx g g^T dP/dx^T + 1/2 h^T h| per sample.
ResidualReport hjb_residual(const ControlAffineSystem& sys,
                            const GeneratingFunction& P,
                            const std::vector<Eigen::VectorXd>& samples,
                            double tol = 1e-8);

/// A^T P + P A - P B B^T P + C^T C.
Eigen::MatrixXd care_residual(const CareMatrices& cm, const Eigen::MatrixXd& P);

/// Solves M^T X + X M + Q = 0 through the Kronecker-vectorized system.
/// Throws ConvergenceError if the operator is singular.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Q);

/// True iff M^T X + X M = -I has a positive-definite solution.
bool is_hurwitz(const Eigen::MatrixXd& M);

/// Stabilizing initial gain: 0 if A is Hurwitz, otherwise a Bass-type shifted
/// Lyapunov gain, falling back to doubling c in K = c B^T. Throws
/// ConvergenceError if none stabilizes.
Eigen::MatrixXd initial_stabilizing_gain(const CareMatrices& cm);

struct CareSolution {
  Eigen::MatrixXd P;
  double residual = 0.0;  ///< Frobenius norm of care_residual
  int iterations = 0;
};

/// Newton-Kleinman iteration. Throws ConvergenceError when the residual is
/// above `tol` after `max_iter` iterations or the initial gain does not
/// stabilize.
CareSolution solve_care(const CareMatrices& cm, double tol = 1e-10,
                        int max_iter = 100,
                        std::optional<Eigen::MatrixXd> initial_gain = std::nullopt);

using Feedback = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// u(x) = -g(x)^T dP/dx^T(x).
Feedback optimal_feedback(const ControlAffineSystem& sys,
                          const GeneratingFunction& P);

/// Pi(x) = Hessian of P, an integrable Lagrangian graph.
MetricField hessian_metric(const GeneratingFunction& P);

}  // namespace varlift::riccati
