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
#include "varlift/riccati.h"

#include <cmath>
#include <limits>
#include <string>

#include "varlift/errors.h"
#include "varlift/geometry.h"

namespace varlift::riccati {

namespace {

void require_metric_dim(const ControlAffineSystem& sys, const MetricField& pi) {
  if (pi.dim() != sys.n()) {
    throw DimensionError("metric dimension " + std::to_string(pi.dim()) +
                         " does not match state dimension " +
                         std::to_string(sys.n()));
  }
}

void require_no_inputs(const ControlAffineSystem& sys, const Eigen::VectorXd& x) {
  for (int j = 0; j < sys.num_inputs(); ++j) {
    if (sys.g()[j](x).lpNorm<Eigen::Infinity>() != 0.0 ||
        expr::jacobian(sys.g()[j], x).lpNorm<Eigen::Infinity>() != 0.0) {
      throw DimensionError("input field g_" + std::to_string(j + 1) +
                           " is nonzero; the Lyapunov form needs g = 0");
    }
  }
}

// Lyapunov part shared by the Riccati and Lyapunov residuals.
Eigen::MatrixXd lyapunov_matrix(const ControlAffineSystem& sys,
                                const MetricField& pi,
                                const Eigen::VectorXd& x) {
  const Eigen::MatrixXd J = expr::jacobian(sys.f(), x);
  const Eigen::MatrixXd P = pi(x);
  const Eigen::MatrixXd H = sys.output_jacobian(x);
  return J.transpose() * P + P * J + H.transpose() * H +
         pi.directional(x, sys.f()(x));
}

}  // namespace

Eigen::MatrixXd diff_riccati_matrix(const ControlAffineSystem& sys,
                                    const MetricField& pi,
                                    const Eigen::VectorXd& x) {
  require_metric_dim(sys, pi);
  Eigen::MatrixXd R = lyapunov_matrix(sys, pi, x);
  if (sys.num_inputs() > 0) {
    const Eigen::MatrixXd PG = pi(x) * sys.input_matrix(x);
    R -= PG * PG.transpose();
  }
  return R;
}

ResidualReport diff_riccati_residual(const ControlAffineSystem& sys,
                                     const MetricField& pi,
                                     const std::vector<Eigen::VectorXd>& samples,
                                     double tol) {
  return riccati_check(sys, pi, samples, tol, false);
}

ResidualReport input_invariance_residual(
    const ControlAffineSystem& sys, const MetricField& pi,
    const std::vector<Eigen::VectorXd>& samples, double tol) {
  require_metric_dim(sys, pi);
  ResidualReport report;
  report.check = "input-invariance";
  report.tolerance = tol;
  for (const auto& x : samples) {
    ResidualRecord rec{x, 0.0, {}};
    for (int j = 0; j < sys.num_inputs(); ++j) {
      const double r =
          geometry::graph_invariance_matrix(pi, sys.g()[j], x).norm();
      rec.details.emplace_back("g" + std::to_string(j + 1), r);
      rec.residual = std::max(rec.residual, r);
    }
    report.records.push_back(std::move(rec));
  }
  finalize(report);
  return report;
}

ResidualReport riccati_check(const ControlAffineSystem& sys,
                             const MetricField& pi,
                             const std::vector<Eigen::VectorXd>& samples,
                             double tol, bool include_input_invariance) {
  ResidualReport report;
  report.check = "riccati";
  report.tolerance = tol;
  for (const auto& x : samples) {
    const double r = diff_riccati_matrix(sys, pi, x).norm();
    ResidualRecord rec{x, r, {}};
    if (include_input_invariance) {
      rec.details.emplace_back("riccati", r);
      double worst = 0.0;
      for (int j = 0; j < sys.num_inputs(); ++j) {
        worst = std::max(
            worst, geometry::graph_invariance_matrix(pi, sys.g()[j], x).norm());
      }
      rec.details.emplace_back("input_invariance", worst);
      rec.residual = std::max(r, worst);
    }
    report.records.push_back(std::move(rec));
  }
  finalize(report);
  return report;
}

ResidualReport diff_lyapunov_residual(const ControlAffineSystem& sys,
                                      const MetricField& pi,
                                      const std::vector<Eigen::VectorXd>& samples,
                                      double tol) {
  require_metric_dim(sys, pi);
  ResidualReport report;
  report.check = "lyapunov";
  report.tolerance = tol;
  for (const auto& x : samples) {
    require_no_inputs(sys, x);
    report.records.push_back({x, lyapunov_matrix(sys, pi, x).norm(), {}});
  }
  finalize(report);
  return report;
}

ResidualReport hjb_residual(const ControlAffineSystem& sys,
                            const GeneratingFunction& P,
                            const std::vector<Eigen::VectorXd>& samples,
                            double tol) {
  if (P.P.dim_out() != 1 || P.P.dim_in() != sys.n()) {
    throw DimensionError("generating function must be scalar on R^n");
  }
  ResidualReport report;
  report.check = "hjb";
  report.tolerance = tol;
  for (const auto& x : samples) {
    const Eigen::VectorXd grad = expr::gradient(P.P, x);
    const Eigen::VectorXd gtp = sys.input_matrix(x).transpose() * grad;
    const Eigen::VectorXd y = sys.outputs(x);
    const double r = grad.dot(sys.f()(x)) - 0.5 * gtp.squaredNorm() +
                     0.5 * y.squaredNorm();
    report.records.push_back({x, std::abs(r), {{"signed", r}}});
  }
  finalize(report);
  return report;
}

Eigen::MatrixXd care_residual(const CareMatrices& cm, const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd PB = P * cm.B;
  return cm.A.transpose() * P + P * cm.A - PB * PB.transpose() +
         cm.C.transpose() * cm.C;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& M,
                               const Eigen::MatrixXd& Q) {
  const Eigen::Index n = M.rows();
  if (M.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw DimensionError("solve_lyapunov: shapes must be n x n");
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd Mt = M.transpose();
  // vec(M^T X) = (I kron M^T) vec X,  vec(X M) = (M^T kron I) vec X.
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      op.block(i * n, j * n, n, n) += I(i, j) * Mt + Mt(i, j) * I;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(op);
  if (!lu.isInvertible()) {
    throw ConvergenceError("Lyapunov operator is singular");
  }
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
  const Eigen::VectorXd sol = lu.solve(rhs);
  Eigen::MatrixXd X = Eigen::Map<const Eigen::MatrixXd>(sol.data(), n, n);
  return 0.5 * (X + X.transpose());
}

bool is_hurwitz(const Eigen::MatrixXd& M) {
  const Eigen::Index n = M.rows();
  Eigen::MatrixXd X;
  try {
    X = solve_lyapunov(M, Eigen::MatrixXd::Identity(n, n));
  } catch (const ConvergenceError&) {
    return false;
  }
  if (!X.allFinite()) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(X);
  return llt.info() == Eigen::Success;
}

Eigen::MatrixXd initial_stabilizing_gain(const CareMatrices& cm) {
  const Eigen::Index n = cm.A.rows();
  const Eigen::Index m = cm.B.cols();
  if (is_hurwitz(cm.A)) return Eigen::MatrixXd::Zero(m, n);

  // Shift A until -(A + beta I) is Hurwitz, solve
  // (A + beta I) Z + Z (A + beta I)^T = 2 B B^T and take K = B^T Z^{-1}.
  const double beta = cm.A.norm() + 1.0;
  const Eigen::MatrixXd shifted =
      cm.A + beta * Eigen::MatrixXd::Identity(n, n);
  try {
    const Eigen::MatrixXd Z =
        solve_lyapunov(-shifted.transpose(), 2.0 * cm.B * cm.B.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(Z);
    if (llt.info() == Eigen::Success) {
      const Eigen::MatrixXd K = llt.solve(cm.B).transpose();
      if (is_hurwitz(cm.A - cm.B * K)) return K;
    }
  } catch (const ConvergenceError&) {
  }

  double c = 1.0;
  for (int k = 0; k < 60; ++k, c *= 2.0) {
    const Eigen::MatrixXd K = c * cm.B.transpose();
    if (is_hurwitz(cm.A - cm.B * K)) return K;
  }
  throw ConvergenceError("no stabilizing initial gain found");
}

CareSolution solve_care(const CareMatrices& cm, double tol, int max_iter,
                        std::optional<Eigen::MatrixXd> initial_gain) {
  const Eigen::Index n = cm.A.rows();
  if (cm.A.cols() != n || cm.B.rows() != n || cm.C.cols() != n) {
    throw DimensionError("CARE matrices have inconsistent shapes");
  }
  Eigen::MatrixXd K = initial_gain ? *initial_gain : initial_stabilizing_gain(cm);
  if (K.rows() != cm.B.cols() || K.cols() != n) {
    throw DimensionError("initial gain must be m x n");
  }
  if (!is_hurwitz(cm.A - cm.B * K)) {
    throw ConvergenceError("initial gain does not stabilize A - B K");
  }

  const Eigen::MatrixXd CtC = cm.C.transpose() * cm.C;
  CareSolution best;
  best.residual = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd P_prev;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::MatrixXd P =
        solve_lyapunov(cm.A - cm.B * K, CtC + K.transpose() * K);
    const double res = care_residual(cm, P).norm();
    const bool stalled = res >= best.residual;
    if (res < best.residual) best = {P, res, it};
    const bool small_step =
        it > 1 && (P - P_prev).norm() <= 1e-14 * std::max(1.0, P.norm());
    if (best.residual <= tol && (small_step || stalled)) break;
    K = cm.B.transpose() * P;
    P_prev = P;
  }
  if (!(best.residual <= tol)) {
    throw ConvergenceError("Newton-Kleinman did not converge: residual " +
                           std::to_string(best.residual) + " after " +
                           std::to_string(max_iter) + " iterations");
  }
  return best;
}

Feedback optimal_feedback(const ControlAffineSystem& sys,
                          const GeneratingFunction& P) {
  if (P.P.dim_out() != 1 || P.P.dim_in() != sys.n()) {
    throw DimensionError("generating function must be scalar on R^n");
  }
  return [sys, P](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return -sys.input_matrix(x).transpose() * expr::gradient(P.P, x);
  };
}

MetricField hessian_metric(const GeneratingFunction& P) {
  return MetricField::hessian_of(P.P);
}

}  // namespace varlift::riccati
