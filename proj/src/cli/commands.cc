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
#include "varlift/cli/commands.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "varlift/cli/json_out.h"
#include "varlift/riccati.h"

namespace varlift::cli {

using nlohmann::json;

namespace {

constexpr double kDefaultTol = 1e-8;
constexpr double kDriftConsistent = 1e-6;
constexpr double kDriftInconsistent = 1e-2;
constexpr double kPairingSlack = 1e-9;

json vec(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json mat(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vec(m.row(i).transpose()));
  return out;
}

SystemConfig load(const CommonOptions& opts) {
  if (opts.config_path.empty()) throw ConfigError("--config", "no config file given");
  SystemConfig cfg = load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.grid) {
    cfg.grid = *opts.grid;
    cfg.random_count.reset();
  }
  if (opts.random_count) cfg.random_count = *opts.random_count;
  if (opts.T) cfg.T = *opts.T;
  if (opts.dt) cfg.dt = *opts.dt;
  return cfg;
}

json report_json(const ResidualReport& r, const SystemConfig& cfg) {
  json records = json::array();
  for (const auto& rec : r.records) {
    json e{{"point", vec(rec.point)}, {"residual", rec.residual}};
    if (!rec.details.empty()) {
      json d = json::object();
      for (const auto& [k, v] : rec.details) d[k] = v;
      e["details"] = d;
    }
    records.push_back(e);
  }
  json out{{"check", r.check},
           {"records", records},
           {"max_residual", r.max_residual},
           {"pass", r.pass},
           {"tolerance", r.tolerance},
           {"config", resolved_config(cfg)}};
  out["argmax"] = r.records.empty() ? json(nullptr) : vec(r.argmax_point());
  out["seed"] = r.seed ? json(*r.seed) : json(nullptr);
  return out;
}

CommandResult from_report(const ResidualReport& r, const SystemConfig& cfg) {
  return {r.pass ? kExitPass : kExitFail, dump_json(report_json(r, cfg)), ""};
}

ResidualReport with_seed(ResidualReport r, const SystemConfig& cfg) {
  if (cfg.random_count) {
    r.seed = cfg.seed;
  } else {
    r.seed.reset();
  }
  return r;
}

// Maps library exceptions onto the exit-code contract.
CommandResult guarded(const std::function<CommandResult()>& body) {
  try {
    return body();
  } catch (const ConvergenceError& e) {
    return {kExitFail, "", std::string("error: ") + e.what() + "\n"};
  } catch (const ParseError& e) {
    return {kExitError, "",
            "parse error at offset " + std::to_string(e.offset()) + ": " + e.what() + "\n"};
  } catch (const Error& e) {
    return {kExitError, "", std::string("error: ") + e.what() + "\n"};
  } catch (const nlohmann::json::exception& e) {
    return {kExitError, "", std::string("error: ") + e.what() + "\n"};
  }
}

Eigen::VectorXd require_vec(const std::optional<Eigen::VectorXd>& v, const char* field,
                            int n, const std::string& system) {
  if (!v) throw ConfigError(field, "required by system '" + system + "'");
  if (v->size() != n) {
    throw ConfigError(field, "expected " + std::to_string(n) + " entries, got " +
                                 std::to_string(v->size()));
  }
  return *v;
}

}  // namespace

CommandResult cmd_check(const std::string& which, const CommonOptions& opts) {
  return guarded([&]() -> CommandResult {
    static const char* kChecks[] = {"riccati", "input-invariance", "lyapunov",
                                    "hjb", "integrability", "lagrangian"};
    if (std::find(std::begin(kChecks), std::end(kChecks), which) == std::end(kChecks)) {
      throw Error("unknown check '" + which +
                  "' (riccati | input-invariance | lyapunov | hjb | integrability | "
                  "lagrangian)");
    }
    const SystemConfig cfg = load(opts);
    const double tol = opts.tol.value_or(kDefaultTol);
    const auto samples = generate_samples(build_samples(cfg));
    ResidualReport r;
    if (which == "riccati") {
      r = riccati::riccati_check(build_system(cfg), build_metric(cfg), samples, tol,
                                 !opts.skip_input_invariance);
    } else if (which == "input-invariance") {
      r = riccati::input_invariance_residual(build_system(cfg), build_metric(cfg),
                                             samples, tol);
    } else if (which == "lyapunov") {
      r = riccati::diff_lyapunov_residual(build_system(cfg), build_metric(cfg),
                                          samples, tol);
    } else if (which == "hjb") {
      r = riccati::hjb_residual(build_system(cfg), {build_potential(cfg)}, samples, tol);
    } else if (which == "integrability") {
      r = geometry::integrability_residual(build_metric(cfg), samples, tol);
    } else {
      r = geometry::lagrangian_check(build_subbundle(cfg), samples, tol);
    }
    return from_report(with_seed(std::move(r), cfg), cfg);
  });
}

CommandResult cmd_simulate(const CommonOptions& opts) {
  return guarded([&]() -> CommandResult {
    const SystemConfig cfg = load(opts);
    const std::string name = opts.system.value_or("base");
    const auto sys = build_system(cfg);
    const int n = sys.n();
    const int m = sys.num_inputs();
    const int q = sys.num_outputs();
    if (!cfg.T) throw ConfigError("T", "missing (set in config or with --T)");
    const double T = *cfg.T;
    const double dt = cfg.dt.value_or(1e-3);
    if (!(T > 0.0)) throw ConfigError("T", "must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");

    const Eigen::VectorXd x0 = require_vec(cfg.x0, "x0", n, name);
    const auto u = build_input(cfg.input, m, "input");
    Eigen::VectorXd s0;
    sim::SystemRhs rhs;
    sim::InputSignal inputs = u;
    std::optional<expr::MetricField> pi;
    if (cfg.Pi) pi = build_metric(cfg);
    auto whitney_p0 = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
      if (cfg.p0) return require_vec(cfg.p0, "p0", n, name);
      if (pi) return Eigen::VectorXd((*pi)(x) * dx);
      throw ConfigError("p0", "required by system '" + name + "' when Pi is absent");
    };

    if (name == "base") {
      rhs = sim::base_system(sys);
      s0 = x0;
    } else if (name == "prolonged") {
      rhs = sim::prolonged_system(sys);
      const Eigen::VectorXd dx0 = require_vec(cfg.dx0, "dx0", n, name);
      s0.resize(2 * n);
      s0 << x0, dx0;
      inputs = sim::InputSignal::concat(u, build_input(cfg.du_var, m, "du_var"));
    } else if (name == "extension") {
      rhs = sim::extension_system(sys);
      const Eigen::VectorXd p0 =
          !cfg.p0 && pi && cfg.dx0
              ? whitney_p0(x0, require_vec(cfg.dx0, "dx0", n, name))
              : require_vec(cfg.p0, "p0", n, name);
      s0.resize(2 * n);
      s0 << x0, p0;
      inputs = sim::InputSignal::concat(u, build_input(cfg.du_adj, q, "du_adj"));
    } else if (name == "diffham" || name == "difflyap") {
      if (name == "diffham" && m == 0) {
        throw ConfigError("g", "system 'diffham' needs inputs; use 'difflyap'");
      }
      rhs = name == "diffham" ? sim::diffham_system(sys) : sim::difflyap_system(sys);
      const Eigen::VectorXd dx0 = require_vec(cfg.dx0, "dx0", n, name);
      const Eigen::VectorXd p0 = whitney_p0(x0, dx0);
      s0.resize(3 * n);
      s0 << x0, dx0, p0;
      if (name == "difflyap") inputs = sim::InputSignal::zero(0);
    } else {
      throw Error("unknown system '" + name +
                  "' (base | prolonged | extension | diffham | difflyap)");
    }

    const sim::Trajectory traj = sim::integrate(rhs, s0, inputs, 0.0, T, dt);
    if (opts.out) sim::write_csv(traj, *opts.out);

    json summary{{"system", name},
                 {"layout", sim::layout_name(traj.layout)},
                 {"state_names", traj.state_names},
                 {"final_time", traj.times.back()},
                 {"final_state", vec(traj.final_state())},
                 {"steps", traj.times.size() - 1},
                 {"blew_up", traj.blew_up},
                 {"T", T},
                 {"dt", dt},
                 {"config", resolved_config(cfg)}};
    if (traj.blew_up) {
      summary["diagnostic"] = traj.diagnostic;
      summary["truncation_time"] = traj.times.back();
    }
    if (opts.out) summary["csv"] = *opts.out;
    if (traj.layout == sim::StateLayout::kWhitney) {
      const auto pairing = sim::pairing_series(traj);
      summary["pairing"] = {{"initial", pairing.values.front()},
                            {"final", pairing.values.back()},
                            {"drift", pairing.drift},
                            {"max_increase", pairing.max_increase},
                            {"slack_per_step", kPairingSlack},
                            {"nonincreasing", pairing.nonincreasing(kPairingSlack)}};
      if (pi) {
        double max_drift = 0.0;
        for (const auto& s : traj.states) {
          const Eigen::VectorXd x = s.head(n);
          max_drift =
              std::max(max_drift, (s.tail(n) - (*pi)(x) * s.segment(n, n)).norm());
        }
        const char* verdict = max_drift <= kDriftConsistent     ? "consistent"
                              : max_drift > kDriftInconsistent ? "inconsistent"
                                                               : "indeterminate";
        summary["graph_drift"] = {
            {"max", max_drift},
            {"consistent_below", kDriftConsistent},
            {"inconsistent_above", kDriftInconsistent},
            {"verdict", verdict},
            {"note", "thresholds are engineering choices, not derived bounds"}};
      }
    }
    CommandResult res{traj.blew_up ? kExitFail : kExitPass, dump_json(summary), ""};
    if (traj.blew_up) res.err = "blow-up: " + traj.diagnostic + "\n";
    return res;
  });
}

namespace {

// Verifies that the configured system is linear (f(0) = 0 with vanishing
// Hessians, constant g, linear h) and returns its matrices.
riccati::CareMatrices linear_data(const SystemConfig& cfg) {
  if (cfg.A) {
    if (!cfg.B) throw ConfigError("B", "missing (required with A)");
    riccati::CareMatrices cm{*cfg.A, *cfg.B,
                             cfg.C ? *cfg.C : Eigen::MatrixXd::Zero(0, cfg.A->cols())};
    if (cm.A.rows() != cm.A.cols()) throw ConfigError("A", "must be square");
    if (cm.B.rows() != cm.A.rows()) throw ConfigError("B", "row count must match A");
    if (cm.C.cols() != cm.A.cols()) throw ConfigError("C", "column count must match A");
    return cm;
  }
  const auto sys = build_system(cfg);
  const int n = sys.n();
  if (sys.num_inputs() == 0) throw ConfigError("g", "solve-lqr needs at least one input");
  constexpr double kProbeTol = 1e-12;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  UniformStream probes(0x5eed);
  std::vector<Eigen::VectorXd> points{zero};
  for (int k = 0; k < 4; ++k) points.push_back(probes.vector(n, -1.0, 1.0));

  auto scalar = [n](const expr::Expr& e) { return expr::SmoothMap(n, {e}); };
  auto nonlinear = [](const std::string& what) {
    return DimensionError("system is not linear: " + what);
  };
  if (sys.f()(zero).cwiseAbs().maxCoeff() > kProbeTol) throw nonlinear("f(0) != 0");
  for (const auto& x : points) {
    for (int i = 0; i < n; ++i) {
      if (expr::hessian(scalar(sys.f().component(i)), x).cwiseAbs().maxCoeff() >
          kProbeTol) {
        throw nonlinear("f" + std::to_string(i + 1) + " has a nonzero Hessian");
      }
    }
    for (std::size_t j = 0; j < sys.g().size(); ++j) {
      if (expr::jacobian(sys.g()[j], x).cwiseAbs().maxCoeff() > kProbeTol) {
        throw nonlinear("g" + std::to_string(j + 1) + " is not constant");
      }
    }
    for (std::size_t j = 0; j < sys.h().size(); ++j) {
      if (expr::hessian(sys.h()[j], x).cwiseAbs().maxCoeff() > kProbeTol) {
        throw nonlinear("h" + std::to_string(j + 1) + " has a nonzero Hessian");
      }
    }
  }
  if (sys.num_outputs() > 0 && sys.outputs(zero).cwiseAbs().maxCoeff() > kProbeTol) {
    throw nonlinear("h(0) != 0");
  }
  return {expr::jacobian(sys.f(), zero), sys.input_matrix(zero),
          sys.output_jacobian(zero)};
}

}  // namespace

CommandResult cmd_solve_lqr(const CommonOptions& opts) {
  return guarded([&]() -> CommandResult {
    const SystemConfig cfg = load(opts);
    const double tol = opts.tol.value_or(1e-10);
    const riccati::CareMatrices cm = linear_data(cfg);
    const riccati::CareSolution sol = riccati::solve_care(cm, tol);
    const Eigen::MatrixXd K = cm.B.transpose() * sol.P;
    Eigen::EigenSolver<Eigen::MatrixXd> es(cm.A - cm.B * K, false);
    std::vector<std::complex<double>> eig(es.eigenvalues().begin(),
                                          es.eigenvalues().end());
    std::sort(eig.begin(), eig.end(), [](const auto& a, const auto& b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    json eigen = json::array();
    for (const auto& e : eig) eigen.push_back({e.real(), e.imag()});
    json out{{"P", mat(sol.P)},
             {"K", mat(K)},
             {"A", mat(cm.A)},
             {"B", mat(cm.B)},
             {"C", mat(cm.C)},
             {"residual", sol.residual},
             {"iterations", sol.iterations},
             {"tolerance", tol},
             {"pass", sol.residual <= tol},
             {"closed_loop_eigenvalues", eigen},
             {"config", resolved_config(cfg)}};
    return {sol.residual <= tol ? kExitPass : kExitFail, dump_json(out), ""};
  });
}

CommandResult cmd_eigsec(const CommonOptions& opts) {
  return guarded([&]() -> CommandResult {
    const SystemConfig cfg = load(opts);
    geometry::SectionKind kind;
    if (opts.kind == "right") {
      kind = geometry::SectionKind::kRight;
    } else if (opts.kind == "left") {
      kind = geometry::SectionKind::kLeft;
    } else {
      throw Error("unknown section kind '" + opts.kind + "' (right | left)");
    }
    if (!cfg.f) throw ConfigError("f", "missing");
    const auto f = expr::SmoothMap::parse(*cfg.f, cfg.n);
    const auto samples = generate_samples(build_samples(cfg));
    auto res = geometry::eigen_section_check(f, build_section(cfg), kind, samples,
                                             opts.tol.value_or(kDefaultTol));
    json out = report_json(with_seed(std::move(res.report), cfg), cfg);
    out["gamma"] = res.gamma;
    out["kind"] = opts.kind;
    return {out["pass"].get<bool>() ? kExitPass : kExitFail, dump_json(out), ""};
  });
}

CommandResult cmd_examples(const std::optional<std::string>& dir) {
  return guarded([&]() -> CommandResult {
    const auto examples = builtin_examples();
    if (!dir) {
      json all = json::object();
      for (const auto& [name, cfg] : examples) all[name] = cfg;
      return {kExitPass, dump_json(all), ""};
    }
    std::error_code ec;
    std::filesystem::create_directories(*dir, ec);
    std::string listing;
    for (const auto& [name, cfg] : examples) {
      const std::string path = (std::filesystem::path(*dir) / (name + ".json")).string();
      std::ofstream file(path);
      if (!file) throw Error("cannot write '" + path + "'");
      file << dump_json(cfg);
      listing += path + "\n";
    }
    return {kExitPass, listing, ""};
  });
}

}  // namespace varlift::cli
