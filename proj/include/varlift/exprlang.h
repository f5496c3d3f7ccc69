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

// Scalar expression language over state variables x1..xn.
//
// Grammar (whitespace-insensitive):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' exponent)?
//   exponent:= '-'? primary ('^' exponent)?     (must fold to a constant)
//   primary := number | 'x'<index> | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | tan | exp | ln | sqrt | tanh | abs
//
// Exponents are folded to a literal at parse time, so every Pow node has a
// real constant exponent.

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "varlift/dual.h"

namespace varlift::expr {

enum class Func { kSin, kCos, kTan, kExp, kLn, kSqrt, kTanh, kAbs };

const char* func_name(Func f);

struct Node;

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  enum class Kind { kNumber, kVar, kNeg, kAdd, kSub, kMul, kDiv, kPow, kCall };

  static Expr number(double value);
  /// Zero-based variable index.
  static Expr var(int index);
  static Expr neg(Expr a);
  static Expr binary(Kind kind, Expr a, Expr b);
  static Expr pow(Expr base, double exponent);
  static Expr call(Func f, Expr arg);

  Kind kind() const;
  /// Literal value (kNumber) or exponent (kPow).
  double value() const;
  int var_index() const;
  Func func() const;
  const Expr& lhs() const;
  const Expr& rhs() const;

  /// Largest zero-based variable index referenced, or -1 for constants.
  int max_var() const;

  template <typename T>
  T evaluate(std::span<const T> x) const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  Expr::Kind kind = Expr::Kind::kNumber;
  double value = 0.0;
  int var = -1;
  Func func = Func::kSin;
  std::vector<Expr> args;
};

/// Parses `source` with variables x1..xn. Throws ParseError.
Expr parse(std::string_view source, int n);

/// Canonical text form; parse(unparse(e)) == e.
std::string unparse(const Expr& e);

/// k-vector of expressions in n variables.
class SmoothMap {
 public:
  SmoothMap(int dim_in, std::vector<Expr> components);

  static SmoothMap parse(const std::vector<std::string>& sources, int n);
  static SmoothMap parse_scalar(std::string_view source, int n);
  static SmoothMap identity(int n);
  static SmoothMap constant(const Eigen::VectorXd& value, int n);

  int dim_in() const { return dim_in_; }
  int dim_out() const { return static_cast<int>(components_.size()); }
  const Expr& component(int i) const { return components_.at(i); }
  const std::vector<Expr>& components() const { return components_; }

  /// Component-wise evaluation at a generic scalar type. Throws DomainError
  /// carrying the failing component index.
  template <typename T>
  std::vector<T> eval_as(std::span<const T> x) const;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;

 private:
  int dim_in_;
  std::vector<Expr> components_;
};

Eigen::VectorXd eval(const SmoothMap& m, const Eigen::VectorXd& x);

/// Exact Jacobian, one dual pass per input direction. Entry (i, j) is
/// d m_i / d x_j.
Eigen::MatrixXd jacobian(const SmoothMap& m, const Eigen::VectorXd& x);

/// Jacobian-vector product J(x) v in a single dual pass.
Eigen::VectorXd directional(const SmoothMap& m, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& v);

/// Gradient of a scalar map as a column vector.
Eigen::VectorXd gradient(const SmoothMap& s, const Eigen::VectorXd& x);

/// Hessian of a scalar map via nested duals, symmetrized.
Eigen::MatrixXd hessian(const SmoothMap& s, const Eigen::VectorXd& x);

/// General rows x cols grid of expressions.
class MatrixMap {
 public:
  MatrixMap(int dim_in, int rows, int cols, std::vector<Expr> row_major);

  static MatrixMap parse(const std::vector<std::vector<std::string>>& grid,
                         int n);
  static MatrixMap constant(const Eigen::MatrixXd& value, int n);

  int dim_in() const { return dim_in_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Expr& entry(int i, int j) const { return entries_[i * cols_ + j]; }

  Eigen::MatrixXd operator()(const Eigen::VectorXd& x) const;

 private:
  int dim_in_, rows_, cols_;
  std::vector<Expr> entries_;
};

/// Symmetric matrix field Pi(x). Either a lower-triangular grid of
/// expressions mirrored onto the upper triangle, or the Hessian field of a
/// scalar generating function.
class MetricField {
 public:
  /// `lower[i]` holds entries (i, 0..i).
  static MetricField from_lower(std::vector<std::vector<Expr>> lower, int n);
  static MetricField parse_lower(
      const std::vector<std::vector<std::string>>& lower, int n);
  static MetricField constant(const Eigen::MatrixXd& value);
  /// Pi(x) = d^2 P / dx^2 (x).
  static MetricField hessian_of(SmoothMap potential);

  int dim() const { return n_; }
  bool is_hessian() const { return potential_ != nullptr; }
  /// Entry (i, j) for i >= j. Only valid when !is_hessian().
  const Expr& lower_entry(int i, int j) const;

  /// Pi(x); exactly symmetric.
  Eigen::MatrixXd operator()(const Eigen::VectorXd& x) const;

  /// Sum_k dPi/dx_k (x) v_k.
  Eigen::MatrixXd directional(const Eigen::VectorXd& x,
                              const Eigen::VectorXd& v) const;

  /// dPi/dx_k (x) for k = 0..n-1.
  std::vector<Eigen::MatrixXd> partials(const Eigen::VectorXd& x) const;

 private:
  MetricField(int n) : n_(n) {}
  template <typename T>
  T entry_as(int i, int j, std::span<const T> x) const;

  int n_;
  std::vector<Expr> lower_;  // packed row-major lower triangle
  std::shared_ptr<const SmoothMap> potential_;
};

/// Directional derivative of a matrix field along v.
Eigen::MatrixXd matfield_directional(const MetricField& pi,
                                     const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& v);

}  // namespace varlift::expr
