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
#include "varlift/sim.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "varlift/errors.h"
#include "varlift/geometry.h"

namespace varlift::sim {

using geometry::WhitneyState;

// ---------------------------------------------------------------------------
// InputSignal

InputSignal InputSignal::constant(Eigen::VectorXd value) {
  InputSignal s;
  s.kind_ = Kind::kConstant;
  s.channels_ = static_cast<int>(value.size());
  s.values_ = {std::move(value)};
  return s;
}

InputSignal InputSignal::zero(int channels) {
  return constant(Eigen::VectorXd::Zero(channels));
}

namespace {

void validate_table(const std::vector<double>& times,
                    const std::vector<Eigen::VectorXd>& values) {
  if (times.empty() || times.size() != values.size()) {
    throw DimensionError("input table needs matching non-empty times/values");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw DimensionError("input table times must be strictly increasing");
    }
  }
  for (const auto& v : values) {
    if (v.size() != values[0].size()) {
      throw DimensionError("input table rows have different channel counts");
    }
  }
}

}  // namespace

InputSignal InputSignal::piecewise_constant(std::vector<double> times,
                                            std::vector<Eigen::VectorXd> values) {
  validate_table(times, values);
  InputSignal s;
  s.kind_ = Kind::kPiecewiseConstant;
  s.channels_ = static_cast<int>(values[0].size());
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

InputSignal InputSignal::sampled_table(std::vector<double> times,
                                       std::vector<Eigen::VectorXd> values) {
  validate_table(times, values);
  InputSignal s;
  s.kind_ = Kind::kSampledTable;
  s.channels_ = static_cast<int>(values[0].size());
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

InputSignal InputSignal::concat(InputSignal a, InputSignal b) {
  InputSignal s;
  s.kind_ = Kind::kConstant;
  s.channels_ = a.channels_ + b.channels_;
  s.parts_ = {std::move(a), std::move(b)};
  return s;
}

Eigen::VectorXd InputSignal::operator()(double t) const {
  if (!parts_.empty()) {
    Eigen::VectorXd out(channels_);
    Eigen::Index offset = 0;
    for (const auto& part : parts_) {
      out.segment(offset, part.channels()) = part(t);
      offset += part.channels();
    }
    return out;
  }
  switch (kind_) {
    case Kind::kConstant:
      return values_[0];
    case Kind::kPiecewiseConstant: {
      // Index of the last breakpoint strictly before t.
      const auto it = std::lower_bound(times_.begin(), times_.end(), t);
      if (it == times_.begin()) return values_[0];
      return values_[std::distance(times_.begin(), it) - 1];
    }
    case Kind::kSampledTable: {
      if (t <= times_.front()) return values_.front();
      if (t >= times_.back()) return values_.back();
      const auto it = std::upper_bound(times_.begin(), times_.end(), t);
      const std::size_t k = std::distance(times_.begin(), it);
      const double w = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
      return (1.0 - w) * values_[k - 1] + w * values_[k];
    }
  }
  return values_[0];
}

const char* layout_name(StateLayout layout) {
  switch (layout) {
    case StateLayout::kBase: return "base";
    case StateLayout::kTangent: return "tangent";
    case StateLayout::kCotangent: return "cotangent";
    case StateLayout::kWhitney: return "whitney";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// System right-hand sides

namespace {

std::vector<std::string> names(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<std::string> join(std::initializer_list<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Eigen::VectorXd stack(std::initializer_list<const Eigen::VectorXd*> parts) {
  Eigen::Index total = 0;
  for (const auto* p : parts) total += p->size();
  Eigen::VectorXd out(total);
  Eigen::Index offset = 0;
  for (const auto* p : parts) {
    out.segment(offset, p->size()) = *p;
    offset += p->size();
  }
  return out;
}

void require_size(const Eigen::VectorXd& v, int n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + " has dimension " + std::to_string(v.size()) +
                         ", expected " + std::to_string(n));
  }
}

WhitneyState split_whitney(const Eigen::VectorXd& s, int n) {
  return WhitneyState(s.head(n), s.segment(n, n), s.tail(n));
}

}  // namespace

SystemRhs base_system(const ControlAffineSystem& sys) {
  const int n = sys.n();
  return {[sys](double, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
            return RhsValue{sys.drift(x, u), sys.outputs(x)};
          },
          StateLayout::kBase, sys.num_inputs(), names("x", n),
          names("y", sys.num_outputs())};
}

SystemRhs prolonged_system(const ControlAffineSystem& sys) {
  const int n = sys.n();
  const int m = sys.num_inputs();
  return {[sys, n, m](double, const Eigen::VectorXd& s, const Eigen::VectorXd& u) {
            const auto r = systems::prolonged_rhs(sys, s.head(n), s.tail(n),
                                                  u.head(m), u.tail(m));
            return RhsValue{stack({&r.x_dot, &r.dx_dot}), stack({&r.y, &r.dy_var})};
          },
          StateLayout::kTangent, 2 * m, join({names("x", n), names("dx", n)}),
          join({names("y", sys.num_outputs()), names("dyvar", sys.num_outputs())})};
}

SystemRhs extension_system(const ControlAffineSystem& sys) {
  const int n = sys.n();
  const int m = sys.num_inputs();
  const int q = sys.num_outputs();
  return {[sys, n, m, q](double, const Eigen::VectorXd& s, const Eigen::VectorXd& u) {
            const auto r = systems::hamiltonian_extension_rhs(
                sys, s.head(n), s.tail(n), u.head(m), u.tail(q));
            return RhsValue{stack({&r.x_dot, &r.p_dot}), stack({&r.y, &r.dy_adj})};
          },
          StateLayout::kCotangent, m + q, join({names("x", n), names("p", n)}),
          join({names("y", q), names("dyadj", m)})};
}

SystemRhs whitney_open_system(const ControlAffineSystem& sys) {
  const int n = sys.n();
  const int m = sys.num_inputs();
  const int q = sys.num_outputs();
  return {[sys, n, m, q](double, const Eigen::VectorXd& s, const Eigen::VectorXd& u) {
            const Eigen::VectorXd x = s.head(n);
            const Eigen::VectorXd uu = u.head(m);
            const auto pr = systems::prolonged_rhs(sys, x, s.segment(n, n), uu,
                                                   u.segment(m, m));
            const auto ar = systems::adjoint_variational_rhs(sys, x, s.tail(n),
                                                             uu, u.tail(q));
            return RhsValue{stack({&pr.x_dot, &pr.dx_dot, &ar.p_dot}),
                            stack({&pr.y, &pr.dy_var, &ar.dy_adj})};
          },
          StateLayout::kWhitney, 2 * m + q,
          join({names("x", n), names("dx", n), names("p", n)}),
          join({names("y", q), names("dyvar", q), names("dyadj", m)})};
}

SystemRhs diffham_system(const ControlAffineSystem& sys) {
  const int n = sys.n();
  const int m = sys.num_inputs();
  const int q = sys.num_outputs();
  return {[sys, n](double, const Eigen::VectorXd& s, const Eigen::VectorXd& u) {
            const auto r = systems::diff_hamiltonian_rhs(sys, split_whitney(s, n), u);
            return RhsValue{stack({&r.z_dot.x, &r.z_dot.dx, &r.z_dot.p}),
                            stack({&r.y, &r.ports.dy_var, &r.ports.dy_adj})};
          },
          StateLayout::kWhitney, m,
          join({names("x", n), names("dx", n), names("p", n)}),
          join({names("y", q), names("dyvar", q), names("dyadj", m)})};
}

SystemRhs difflyap_system(const ControlAffineSystem& sys) {
  const int n = sys.n();
  const int q = sys.num_outputs();
  return {[sys, n](double, const Eigen::VectorXd& s, const Eigen::VectorXd&) {
            const WhitneyState z = split_whitney(s, n);
            const WhitneyState r = systems::diff_lyapunov_rhs(sys, z);
            const Eigen::VectorXd y = sys.outputs(z.x);
            const Eigen::VectorXd dy = sys.output_jacobian(z.x) * z.dx;
            return RhsValue{stack({&r.x, &r.dx, &r.p}), stack({&y, &dy})};
          },
          StateLayout::kWhitney, 0,
          join({names("x", n), names("dx", n), names("p", n)}),
          join({names("y", q), names("dyvar", q)})};
}

SystemRhs plain_lift_system(const expr::SmoothMap& f) {
  const int n = f.dim_in();
  auto field = geometry::whitney_combine(geometry::complete_lift_vf(f),
                                         geometry::complete_hamiltonian_lift(f));
  return {[field, n](double, const Eigen::VectorXd& s, const Eigen::VectorXd&) {
            const WhitneyState r = field(split_whitney(s, n));
            return RhsValue{stack({&r.x, &r.dx, &r.p}), Eigen::VectorXd(0)};
          },
          StateLayout::kWhitney, 0,
          join({names("x", n), names("dx", n), names("p", n)}),
          {}};
}

// ---------------------------------------------------------------------------
// Integration

namespace {

bool escaped(const Eigen::VectorXd& s) {
  return !s.allFinite() || s.lpNorm<Eigen::Infinity>() > kBlowUpThreshold;
}

std::string format_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

}  // namespace

Trajectory integrate(const SystemRhs& system, const Eigen::VectorXd& state0,
                     const InputSignal& inputs, double t0, double t1,
                     double dt) {
  if (!(dt > 0.0)) throw DimensionError("dt must be positive");
  if (!(t1 >= t0)) throw DimensionError("t_span must be nondecreasing");
  if (inputs.channels() != system.input_channels) {
    throw DimensionError("input signal has " + std::to_string(inputs.channels()) +
                         " channels, system expects " +
                         std::to_string(system.input_channels));
  }
  if (state0.size() != static_cast<Eigen::Index>(system.state_names.size())) {
    throw DimensionError("initial state has dimension " +
                         std::to_string(state0.size()) + ", expected " +
                         std::to_string(system.state_names.size()));
  }

  const double span = t1 - t0;
  const double ratio = span / dt;
  long steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    steps = static_cast<long>(std::ceil(ratio));
  }

  Trajectory traj;
  traj.layout = system.layout;
  traj.state_names = system.state_names;
  traj.output_names = system.output_names;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.outputs.reserve(steps + 1);

  if (escaped(state0)) {
    throw DimensionError("initial state is not finite or beyond blow-up threshold");
  }
  Eigen::VectorXd x = state0;
  double t = t0;
  auto eval = [&](double tt, const Eigen::VectorXd& s) {
    return system.rhs(tt, s, inputs(tt));
  };

  RhsValue k1 = eval(t, x);
  traj.times.push_back(t);
  traj.states.push_back(x);
  traj.outputs.push_back(k1.outputs);

  for (long k = 1; k <= steps; ++k) {
    const double t_next = k == steps ? t1 : t0 + static_cast<double>(k) * dt;
    const double h = t_next - t;
    Eigen::VectorXd next;
    try {
      const Eigen::VectorXd s2 = x + 0.5 * h * k1.rate;
      if (escaped(s2)) throw DimensionError("stage state escaped");
      const RhsValue k2 = eval(t + 0.5 * h, s2);
      const Eigen::VectorXd s3 = x + 0.5 * h * k2.rate;
      if (escaped(s3)) throw DimensionError("stage state escaped");
      const RhsValue k3 = eval(t + 0.5 * h, s3);
      const Eigen::VectorXd s4 = x + h * k3.rate;
      if (escaped(s4)) throw DimensionError("stage state escaped");
      const RhsValue k4 = eval(t_next, s4);
      next = x + (h / 6.0) * (k1.rate + 2.0 * k2.rate + 2.0 * k3.rate + k4.rate);
    } catch (const DimensionError&) {
      next = Eigen::VectorXd::Constant(x.size(), INFINITY);
    }
    if (escaped(next)) {
      traj.blew_up = true;
      traj.diagnostic = "state exceeded " + format_time(kBlowUpThreshold) +
                        " in magnitude during the step from t = " +
                        format_time(t) + "; trajectory truncated";
      break;
    }
    x = std::move(next);
    t = t_next;
    k1 = eval(t, x);
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.outputs.push_back(k1.outputs);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Monitors

double FdTable::min_order() const {
  double best = INFINITY;
  for (double o : orders) best = std::min(best, o);
  return best;
}

FdTable variational_fd_check(const ControlAffineSystem& sys,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& v,
                             const InputSignal& u, double T, double dt,
                             const std::vector<double>& eps_list) {
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || (i > 0 && !(eps_list[i] < eps_list[i - 1]))) {
      throw DimensionError("eps_list must be positive and decreasing");
    }
  }
  const int m = sys.num_inputs();
  const SystemRhs base = base_system(sys);
  const Trajectory nominal = integrate(base, x0, u, 0.0, T, dt);
  if (nominal.blew_up) throw Error("nominal trajectory blew up: " + nominal.diagnostic);

  require_size(x0, sys.n(), "x0");
  require_size(v, sys.n(), "v");
  Eigen::VectorXd s0(2 * sys.n());
  s0 << x0, v;
  const Trajectory prolonged = integrate(
      prolonged_system(sys), s0, InputSignal::concat(u, InputSignal::zero(m)),
      0.0, T, dt);
  if (prolonged.blew_up) throw Error("prolonged trajectory blew up");
  const Eigen::VectorXd dxT = prolonged.final_state().tail(sys.n());

  FdTable table;
  for (double eps : eps_list) {
    const Trajectory perturbed = integrate(base, x0 + eps * v, u, 0.0, T, dt);
    if (perturbed.blew_up) throw Error("perturbed trajectory blew up");
    const Eigen::VectorXd fd =
        (perturbed.final_state() - nominal.final_state()) / eps;
    table.rows.push_back({eps, (fd - dxT).norm()});
  }
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const auto& a = table.rows[i - 1];
    const auto& b = table.rows[i];
    table.orders.push_back(std::log(a.error / b.error) / std::log(a.eps / b.eps));
  }
  return table;
}

PairingSeries pairing_series(const Trajectory& traj) {
  if (traj.layout != StateLayout::kWhitney) {
    throw DimensionError("pairing needs a Whitney-layout trajectory");
  }
  PairingSeries out;
  out.blew_up = traj.blew_up;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const Eigen::VectorXd& s = traj.states[k];
    const Eigen::Index n = s.size() / 3;
    const double v = s.tail(n).dot(s.segment(n, n));
    out.times.push_back(traj.times[k]);
    out.values.push_back(v);
    out.drift = std::max(out.drift, std::abs(v - out.values.front()));
    if (k > 0) {
      out.max_increase = std::max(out.max_increase, v - out.values[k - 1]);
    }
  }
  return out;
}

PairingSeries pairing_monitor(const ControlAffineSystem& sys,
                              const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& dx0,
                              const Eigen::VectorXd& p0, const InputSignal& u,
                              PairingMode mode, double T, double dt) {
  require_size(x0, sys.n(), "x0");
  require_size(dx0, sys.n(), "dx0");
  require_size(p0, sys.n(), "p0");
  Eigen::VectorXd s0(3 * sys.n());
  s0 << x0, dx0, p0;
  if (mode == PairingMode::kOpen) {
    const InputSignal ports = InputSignal::concat(
        u, InputSignal::zero(sys.num_inputs() + sys.num_outputs()));
    return pairing_series(integrate(whitney_open_system(sys), s0, ports, 0.0, T, dt));
  }
  if (sys.num_inputs() == 0) {
    return pairing_series(
        integrate(difflyap_system(sys), s0, InputSignal::zero(0), 0.0, T, dt));
  }
  return pairing_series(integrate(diffham_system(sys), s0, u, 0.0, T, dt));
}

double DriftSeries::first_exceedance(double level) const {
  for (std::size_t k = 0; k < drift.size(); ++k) {
    if (drift[k] > level) return times[k];
  }
  return -1.0;
}

DriftSeries constraint_drift(DriftKind kind, const ControlAffineSystem& sys,
                             const MetricField& pi, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& dx0, const InputSignal& u,
                             double T, double dt) {
  const int n = sys.n();
  if (pi.dim() != n) throw DimensionError("metric dimension mismatch");
  require_size(x0, n, "x0");
  require_size(dx0, n, "dx0");
  const Eigen::VectorXd p0 = pi(x0) * dx0;
  Eigen::VectorXd s0(3 * n);
  s0 << x0, dx0, p0;

  Trajectory traj;
  if (kind == DriftKind::kPlainF) {
    traj = integrate(plain_lift_system(sys.f()), s0, InputSignal::zero(0), 0.0, T, dt);
  } else if (sys.num_inputs() == 0) {
    traj = integrate(difflyap_system(sys), s0, InputSignal::zero(0), 0.0, T, dt);
  } else {
    traj = integrate(diffham_system(sys), s0, u, 0.0, T, dt);
  }

  DriftSeries out;
  out.blew_up = traj.blew_up;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const Eigen::VectorXd& s = traj.states[k];
    const Eigen::VectorXd x = s.head(n);
    const double d = (s.tail(n) - pi(x) * s.segment(n, n)).norm();
    out.times.push_back(traj.times[k]);
    out.drift.push_back(d);
    out.max_drift = std::max(out.max_drift, d);
  }
  return out;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
  out << "t";
  for (const auto& n : traj.state_names) out << ',' << n;
  for (const auto& n : traj.output_names) out << ',' << n;
  out << '\n';
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    put(traj.times[k]);
    for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) {
      out << ',';
      put(traj.states[k][i]);
    }
    for (Eigen::Index i = 0; i < traj.outputs[k].size(); ++i) {
      out << ',';
      put(traj.outputs[k][i]);
    }
    out << '\n';
  }
}

void write_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw Error("cannot open " + path + " for writing");
  write_csv(traj, file);
}

}  // namespace varlift::sim
