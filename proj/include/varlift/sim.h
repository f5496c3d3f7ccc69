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

// Fixed-step classical RK4 integration of the composite systems, with
// monitors for the variational interpretation, the p^T dx pairing and the
// drift off a graph subbundle p = Pi(x) dx.

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "varlift/exprlang.h"
#include "varlift/systems.h"

namespace varlift::sim {

using expr::MetricField;
using systems::ControlAffineSystem;

/// Any component above this magnitude truncates an integration.
inline constexpr double kBlowUpThreshold = 1e12;

/// Time-dependent input vector. Piecewise-constant signals take value k on
/// (t_k, t_{k+1}] (left-continuous), the first value for t <= t_0 and the last value
/// after the last breakpoint. Sampled tables interpolate linearly and clamp
/// outside their range.
class InputSignal {
 public:
  enum class Kind { kConstant, kPiecewiseConstant, kSampledTable };

  static InputSignal constant(Eigen::VectorXd value);
  static InputSignal zero(int channels);
  static InputSignal piecewise_constant(std::vector<double> times,
                                        std::vector<Eigen::VectorXd> values);
  static InputSignal sampled_table(std::vector<double> times,
                                   std::vector<Eigen::VectorXd> values);
  /// Channels of `a` followed by channels of `b`.
  static InputSignal concat(InputSignal a, InputSignal b);

  Kind kind() const { return kind_; }
  int channels() const { return channels_; }
  Eigen::VectorXd operator()(double t) const;

 private:
  Kind kind_ = Kind::kConstant;
  int channels_ = 0;
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> values_;
  std::vector<InputSignal> parts_;  // non-empty for concatenations
};

enum class StateLayout { kBase, kTangent, kCotangent, kWhitney };

const char* layout_name(StateLayout layout);

struct Trajectory {
  StateLayout layout = StateLayout::kBase;
  std::vector<std::string> state_names;
  std::vector<std::string> output_names;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> outputs;
  bool blew_up = false;
  std::string diagnostic;

  const Eigen::VectorXd& final_state() const { return states.back(); }
};

struct RhsValue {
  Eigen::VectorXd rate;
  Eigen::VectorXd outputs;
};

using Rhs = std::function<RhsValue(double t, const Eigen::VectorXd& state,
                                   const Eigen::VectorXd& u)>;

/// A right-hand side together with the naming of its state and outputs.
struct SystemRhs {
  Rhs rhs;
  StateLayout layout;
  int input_channels;
  std::vector<std::string> state_names;
  std::vector<std::string> output_names;
};

/// x' = f + g u; input u; outputs y.
SystemRhs base_system(const ControlAffineSystem& sys);
/// (x, dx); inputs (u, delta u); outputs (y, delta y).
SystemRhs prolonged_system(const ControlAffineSystem& sys);
/// (x, p); inputs (u, du); outputs (y, dy).
SystemRhs extension_system(const ControlAffineSystem& sys);
/// (x, dx, p) with both port pairs open; inputs (u, delta u, du).
SystemRhs whitney_open_system(const ControlAffineSystem& sys);
/// (x, dx, p) closed by delta u = -dy, du = delta y; input u; outputs
/// (y, delta y, dy).
SystemRhs diffham_system(const ControlAffineSystem& sys);
/// Input-free (x, dx, p) system; outputs (y, delta y).
SystemRhs difflyap_system(const ControlAffineSystem& sys);
/// f^c + X_{H^f} on (x, dx, p); no inputs, no outputs.
SystemRhs plain_lift_system(const expr::SmoothMap& f);

/// Classical RK4 from t0 to t1 with step dt (the last step is shortened if
/// dt does not divide the span). Inputs are evaluated at stage times.
/// Blow-up truncates the trajectory and sets `blew_up`.
Trajectory integrate(const SystemRhs& system, const Eigen::VectorXd& state0,
                     const InputSignal& inputs, double t0, double t1, double dt);

struct FdRow {
  double eps;
  double error;  ///< || (x_eps(T) - x(T)) / eps - dx(T) ||
};

struct FdTable {
  std::vector<FdRow> rows;
  /// log(e_i / e_{i+1}) / log(eps_i / eps_{i+1}) for consecutive rows.
  std::vector<double> orders;
  double min_order() const;
};

/// Finite-difference check of the variational system from x0 along v
/// (delta u = 0).
FdTable variational_fd_check(const ControlAffineSystem& sys,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& v,
                             const InputSignal& u, double T, double dt,
                             const std::vector<double>& eps_list);

enum class PairingMode { kOpen, kClosed };

struct PairingSeries {
  std::vector<double> times;
  std::vector<double> values;  ///< p(t)^T dx(t)
  double drift = 0.0;          ///< max_t |value - value(0)|
  double max_increase = 0.0;   ///< max over steps of value_{k+1} - value_k
  bool blew_up = false;

  bool nonincreasing(double slack_per_step) const {
    return max_increase <= slack_per_step;
  }
};

PairingSeries pairing_monitor(const ControlAffineSystem& sys,
                              const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& dx0,
                              const Eigen::VectorXd& p0, const InputSignal& u,
                              PairingMode mode, double T, double dt);

/// p^T dx along a Whitney-layout trajectory.
PairingSeries pairing_series(const Trajectory& traj);

enum class DriftKind { kPlainF, kDiffHam };

struct DriftSeries {
  std::vector<double> times;
  std::vector<double> drift;  ///< || p(t) - Pi(x(t)) dx(t) ||
  double max_drift = 0.0;
  bool blew_up = false;

  /// First time at which drift exceeds `level`, or a negative value.
  double first_exceedance(double level) const;
};

/// Starts on the graph (p0 = Pi(x0) dx0) and integrates f^c + X_{H^f}
/// (kPlainF, inputs ignored) or the differential Hamiltonian system.
DriftSeries constraint_drift(DriftKind kind, const ControlAffineSystem& sys,
                             const MetricField& pi, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& dx0, const InputSignal& u,
                             double T, double dt);

/// CSV with header `t,<state names>,<output names>`, 17 significant digits.
void write_csv(const Trajectory& traj, std::ostream& out);
void write_csv(const Trajectory& traj, const std::string& path);

}  // namespace varlift::sim
