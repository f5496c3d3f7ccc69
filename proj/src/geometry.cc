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
#include "varlift/geometry.h"

#include <cmath>
#include <string>

#include "varlift/errors.h"

namespace varlift::geometry {

namespace {

void require_same_size(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
}

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw DimensionError(std::string(what) + " is not finite");
}

void require_scalar(const SmoothMap& h, const char* what) {
  if (h.dim_out() != 1) {
    throw DimensionError(std::string(what) + " must be scalar-valued");
  }
}

void require_square(const SmoothMap& f, const char* what) {
  if (f.dim_out() != f.dim_in()) {
    throw DimensionError(std::string(what) + " must map R^n to R^n");
  }
}

}  // namespace

TangentState::TangentState(Eigen::VectorXd x_, Eigen::VectorXd dx_)
    : x(std::move(x_)), dx(std::move(dx_)) {
  require_same_size(x, dx, "TangentState");
  require_finite(x, "TangentState base point");
  require_finite(dx, "TangentState fiber");
}

CotangentState::CotangentState(Eigen::VectorXd x_, Eigen::VectorXd p_)
    : x(std::move(x_)), p(std::move(p_)) {
  require_same_size(x, p, "CotangentState");
  require_finite(x, "CotangentState base point");
  require_finite(p, "CotangentState fiber");
}

WhitneyState::WhitneyState(Eigen::VectorXd x_, Eigen::VectorXd dx_,
                           Eigen::VectorXd p_)
    : x(std::move(x_)), dx(std::move(dx_)), p(std::move(p_)) {
  require_same_size(x, dx, "WhitneyState");
  require_same_size(x, p, "WhitneyState");
  require_finite(x, "WhitneyState base point");
  require_finite(dx, "WhitneyState tangent fiber");
  require_finite(p, "WhitneyState cotangent fiber");
}

TangentFn complete_lift_fn(const SmoothMap& h) {
  require_scalar(h, "complete_lift_fn argument");
  return [h](const TangentState& s) {
    return expr::directional(h, s.x, s.dx)[0];
  };
}

VerticalLiftFn::VerticalLiftFn(SmoothMap h) : h_(std::move(h)) {
  require_scalar(h_, "vertical_lift_fn argument");
}
double VerticalLiftFn::operator()(const TangentState& s) const {
  return h_(s.x)[0];
}
double VerticalLiftFn::operator()(const CotangentState& s) const {
  return h_(s.x)[0];
}

VerticalLiftFn vertical_lift_fn(const SmoothMap& h) { return VerticalLiftFn(h); }

TangentField complete_lift_vf(const SmoothMap& f) {
  require_square(f, "complete_lift_vf argument");
  return [f](const TangentState& s) {
    return TangentState(f(s.x), expr::directional(f, s.x, s.dx));
  };
}

TangentField vertical_lift_vf(const SmoothMap& f) {
  require_square(f, "vertical_lift_vf argument");
  return [f](const TangentState& s) {
    return TangentState(Eigen::VectorXd::Zero(s.x.size()), f(s.x));
  };
}

CotangentFn hamiltonian_function(const SmoothMap& f) {
  require_square(f, "hamiltonian_function argument");
  return [f](const CotangentState& s) { return s.p.dot(f(s.x)); };
}

CotangentField complete_hamiltonian_lift(const SmoothMap& f) {
  require_square(f, "complete_hamiltonian_lift argument");
  return [f](const CotangentState& s) {
    const Eigen::MatrixXd J = expr::jacobian(f, s.x);
    return CotangentState(f(s.x), -J.transpose() * s.p);
  };
}

CotangentField vertical_hamiltonian_lift(const SmoothMap& h) {
  require_scalar(h, "vertical_hamiltonian_lift argument");
  return [h](const CotangentState& s) {
    return CotangentState(Eigen::VectorXd::Zero(s.x.size()),
                          -expr::gradient(h, s.x));
  };
}

WhitneyState whitney_join(const TangentState& tangent_rate,
                          const CotangentState& cotangent_rate) {
  if (tangent_rate.x.size() != cotangent_rate.x.size() ||
      tangent_rate.x != cotangent_rate.x) {
    throw DimensionError(
        "whitney_combine: base components of the two lifts differ");
  }
  return WhitneyState(tangent_rate.x, tangent_rate.dx, cotangent_rate.p);
}

WhitneyField whitney_combine(TangentField tangent, CotangentField cotangent) {
  return [tangent = std::move(tangent),
          cotangent = std::move(cotangent)](const WhitneyState& z) {
    return whitney_join(tangent(z.tangent()), cotangent(z.cotangent()));
  };
}

Eigen::VectorXd lie_bracket(const SmoothMap& f, const SmoothMap& X,
                            const Eigen::VectorXd& x) {
  require_square(f, "lie_bracket f");
  require_square(X, "lie_bracket X");
  if (f.dim_in() != X.dim_in()) {
    throw DimensionError("lie_bracket: fields on different dimensions");
  }
  return expr::directional(X, x, f(x)) - expr::directional(f, x, X(x));
}

Eigen::VectorXd lie_derivative_oneform(const SmoothMap& f,
                                       const SmoothMap& alpha,
                                       const Eigen::VectorXd& x) {
  require_square(f, "lie_derivative_oneform f");
  require_square(alpha, "lie_derivative_oneform alpha");
  if (f.dim_in() != alpha.dim_in()) {
    throw DimensionError("lie_derivative_oneform: dimension mismatch");
  }
  return expr::jacobian(f, x).transpose() * alpha(x) +
         expr::directional(alpha, x, f(x));
}

EigenSectionResult eigen_section_check(
    const SmoothMap& f, const SmoothMap& S, SectionKind kind,
    const std::vector<Eigen::VectorXd>& samples, double tol) {
  EigenSectionResult result;
  result.report.check =
      kind == SectionKind::kRight ? "eigsec-right" : "eigsec-left";
  result.report.tolerance = tol;
  for (const auto& x : samples) {
    const Eigen::VectorXd s = S(x);
    const double ss = s.squaredNorm();
    if (!(std::sqrt(ss) > 1e-12)) {
      throw DimensionError("section vanishes at a sample point");
    }
    const Eigen::VectorXd lie = kind == SectionKind::kRight
                                    ? lie_bracket(f, S, x)
                                    : lie_derivative_oneform(f, S, x);
    const double gamma = lie.dot(s) / ss;
    result.gamma.push_back(gamma);
    result.report.records.push_back(
        {x, (lie - gamma * s).norm(), {{"gamma", gamma}}});
  }
  finalize(result.report);
  return result;
}

ResidualReport lagrangian_check(const SubbundleUV& K,
                                const std::vector<Eigen::VectorXd>& samples,
                                double tol) {
  const int n = K.U.rows();
  if (K.U.cols() != n || K.V.rows() != n || K.V.cols() != n) {
    throw DimensionError("lagrangian_check: U and V must be n x n");
  }
  ResidualReport report;
  report.check = "lagrangian";
  report.tolerance = tol;
  bool all_rank_ok = true;
  for (const auto& x : samples) {
    const Eigen::MatrixXd U = K.U(x);
    const Eigen::MatrixXd V = K.V(x);
    const double sym = (V * U.transpose() - U * V.transpose()).norm();
    Eigen::MatrixXd stacked(n, 2 * n);
    stacked << U, V;
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(stacked).singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    const double smin = sv.size() ? sv[sv.size() - 1] : 0.0;
    const double ratio = smax > 0.0 ? smin / smax : 0.0;
    const bool rank_ok = smax > 0.0 && ratio > kRankCutoff;
    all_rank_ok = all_rank_ok && rank_ok;
    report.records.push_back(
        {x, sym, {{"sigma_ratio", ratio}, {"rank_ok", rank_ok ? 1.0 : 0.0}}});
  }
  finalize(report, all_rank_ok);
  return report;
}

ResidualReport integrability_residual(
    const MetricField& pi, const std::vector<Eigen::VectorXd>& samples,
    double tol) {
  ResidualReport report;
  report.check = "integrability";
  report.tolerance = tol;
  const int n = pi.dim();
  for (const auto& x : samples) {
    const auto d = pi.partials(x);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          worst = std::max(worst, std::abs(d[i](j, k) - d[j](i, k)));
        }
      }
    }
    report.records.push_back({x, worst, {}});
  }
  finalize(report);
  return report;
}

Eigen::MatrixXd graph_invariance_matrix(const MetricField& pi,
                                        const SmoothMap& v,
                                        const Eigen::VectorXd& x) {
  require_square(v, "graph_invariance vector field");
  if (v.dim_in() != pi.dim()) {
    throw DimensionError("graph_invariance: metric and field dimensions differ");
  }
  const Eigen::MatrixXd J = expr::jacobian(v, x);
  const Eigen::MatrixXd P = pi(x);
  return J.transpose() * P + P * J + pi.directional(x, v(x));
}

ResidualReport graph_invariance_residual(
    const MetricField& pi, const SmoothMap& v,
    const std::vector<Eigen::VectorXd>& samples, double tol) {
  ResidualReport report;
  report.check = "graph-invariance";
  report.tolerance = tol;
  for (const auto& x : samples) {
    report.records.push_back({x, graph_invariance_matrix(pi, v, x).norm(), {}});
  }
  finalize(report);
  return report;
}

}  // namespace varlift::geometry
