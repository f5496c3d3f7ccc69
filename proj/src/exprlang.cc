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
#include "varlift/exprlang.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>

#include "varlift/errors.h"

namespace varlift::expr {

const char* func_name(Func f) {
  switch (f) {
    case Func::kSin: return "sin";
    case Func::kCos: return "cos";
    case Func::kTan: return "tan";
    case Func::kExp: return "exp";
    case Func::kLn: return "ln";
    case Func::kSqrt: return "sqrt";
    case Func::kTanh: return "tanh";
    case Func::kAbs: return "abs";
  }
  return "?";
}

namespace {

std::optional<Func> lookup_func(std::string_view name) {
  static constexpr std::pair<std::string_view, Func> kTable[] = {
      {"sin", Func::kSin},   {"cos", Func::kCos},   {"tan", Func::kTan},
      {"exp", Func::kExp},   {"ln", Func::kLn},     {"sqrt", Func::kSqrt},
      {"tanh", Func::kTanh}, {"abs", Func::kAbs}};
  for (const auto& [n, f] : kTable) {
    if (n == name) return f;
  }
  return std::nullopt;
}

// Evaluates a variable-free expression; used to fold exponents.
double fold_constant(const Expr& e) {
  return e.evaluate<double>(std::span<const double>{});
}

class Parser {
 public:
  Parser(std::string_view src, int n) : src_(src), n_(n) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) {
      fail(ParseError::Kind::kSyntax, "unexpected character '" +
                                          std::string(1, src_[pos_]) + "'");
    }
    return e;
  }

 private:
  [[noreturn]] void fail(ParseError::Kind kind, const std::string& msg,
                         std::optional<std::size_t> at = std::nullopt) const {
    throw ParseError(kind, at.value_or(pos_), msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      fail(ParseError::Kind::kSyntax, std::string("expected '") + c + "'");
    }
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(Expr::Kind::kAdd, lhs, parse_term());
      } else if (accept('-')) {
        lhs = Expr::binary(Expr::Kind::kSub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(Expr::Kind::kMul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = Expr::binary(Expr::Kind::kDiv, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::neg(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return Expr::pow(base, parse_exponent());
    return base;
  }

  double parse_exponent() {
    skip_ws();
    const std::size_t start = pos_;
    bool negate = accept('-');
    Expr e = parse_primary();
    if (accept('^')) e = Expr::pow(e, parse_exponent());
    if (e.max_var() >= 0) {
      fail(ParseError::Kind::kSyntax, "exponent must be a numeric literal",
           start);
    }
    double v = fold_constant(e);
    return negate ? -v : v;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) {
      fail(ParseError::Kind::kSyntax, "unexpected end of input");
    }
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parse_identifier();
    }
    fail(ParseError::Kind::kSyntax,
         "unexpected character '" + std::string(1, c) + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t count = 0;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++count;
      }
      return count;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail(ParseError::Kind::kSyntax, "malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        fail(ParseError::Kind::kSyntax, "malformed exponent in number", start);
      }
    }
    double value = 0.0;
    const auto text = src_.substr(start, pos_ - start);
    auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      fail(ParseError::Kind::kSyntax, "malformed number", start);
    }
    return Expr::number(value);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);
    if (auto f = lookup_func(name)) {
      expect('(');
      Expr arg = parse_expr();
      expect(')');
      return Expr::call(*f, arg);
    }
    if (name.size() >= 2 && name[0] == 'x') {
      const std::string_view digits = name.substr(1);
      bool all_digits = true;
      for (char d : digits) {
        all_digits = all_digits && std::isdigit(static_cast<unsigned char>(d));
      }
      if (all_digits) {
        long index = 0;
        auto [ptr, ec] = std::from_chars(
            digits.data(), digits.data() + digits.size(), index);
        if (ec != std::errc() || index < 1 || index > n_) {
          fail(ParseError::Kind::kVariableOutOfRange,
               "variable index out of range: " + std::string(name) +
                   " (dimension " + std::to_string(n_) + ")",
               start);
        }
        return Expr::var(static_cast<int>(index - 1));
      }
    }
    fail(ParseError::Kind::kUnknownIdentifier,
         "unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view src_;
  int n_;
  std::size_t pos_ = 0;
};

// Shortest round-trip text for a double.
std::string format_number(double v) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void unparse_into(const Expr& e, std::string& out) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::kNumber:
      out += format_number(e.value());
      return;
    case K::kVar:
      out += "x" + std::to_string(e.var_index() + 1);
      return;
    case K::kNeg:
      out += "(-";
      unparse_into(e.lhs(), out);
      out += ")";
      return;
    case K::kAdd:
    case K::kSub:
    case K::kMul:
    case K::kDiv: {
      const char op = e.kind() == K::kAdd   ? '+'
                      : e.kind() == K::kSub ? '-'
                      : e.kind() == K::kMul ? '*'
                                            : '/';
      out += "(";
      unparse_into(e.lhs(), out);
      out += ' ';
      out += op;
      out += ' ';
      unparse_into(e.rhs(), out);
      out += ")";
      return;
    }
    case K::kPow:
      out += "(";
      unparse_into(e.lhs(), out);
      out += "^";
      if (e.value() < 0.0) {
        out += "(-" + format_number(-e.value()) + ")";
      } else {
        out += format_number(e.value());
      }
      out += ")";
      return;
    case K::kCall:
      out += func_name(e.func());
      out += "(";
      unparse_into(e.lhs(), out);
      out += ")";
      return;
  }
}

template <typename T>
T apply_func(Func f, const T& a) {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  using std::tan;
  using std::tanh;
  const double v = primal(a);
  switch (f) {
    case Func::kSin: return sin(a);
    case Func::kCos: return cos(a);
    case Func::kTan:
      if (std::cos(v) == 0.0) throw DomainError(-1, "tan at a pole");
      return tan(a);
    case Func::kExp: return exp(a);
    case Func::kLn:
      if (!(v > 0.0)) throw DomainError(-1, "ln of a non-positive value");
      return log(a);
    case Func::kSqrt:
      if (v < 0.0) throw DomainError(-1, "sqrt of a negative value");
      return sqrt(a);
    case Func::kTanh: return tanh(a);
    case Func::kAbs: return abs(a);
  }
  return a;
}

template <typename T>
T power(const T& base, double c) {
  using std::pow;
  const double b = primal(base);
  const bool integral = std::floor(c) == c;
  if (!integral && b < 0.0) {
    throw DomainError(-1, "non-integer power of a negative value");
  }
  if (c < 0.0 && b == 0.0) throw DomainError(-1, "negative power of zero");
  return pow(base, c);
}

}  // namespace

namespace {

Node make_node(Expr::Kind kind, std::vector<Expr> args = {}) {
  Node n;
  n.kind = kind;
  n.args = std::move(args);
  return n;
}

}  // namespace

Expr Expr::number(double value) {
  Node n = make_node(Kind::kNumber);
  n.value = value;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::var(int index) {
  Node n = make_node(Kind::kVar);
  n.var = index;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::neg(Expr a) {
  Node n = make_node(Kind::kNeg, {std::move(a)});
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::binary(Kind kind, Expr a, Expr b) {
  Node n = make_node(kind, {std::move(a), std::move(b)});
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::pow(Expr base, double exponent) {
  Node n = make_node(Kind::kPow, {std::move(base)});
  n.value = exponent;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::call(Func f, Expr arg) {
  Node n = make_node(Kind::kCall, {std::move(arg)});
  n.func = f;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
int Expr::var_index() const { return node_->var; }
Func Expr::func() const { return node_->func; }
const Expr& Expr::lhs() const { return node_->args.at(0); }
const Expr& Expr::rhs() const { return node_->args.at(1); }

int Expr::max_var() const {
  int best = node_->kind == Kind::kVar ? node_->var : -1;
  for (const auto& a : node_->args) best = std::max(best, a.max_var());
  return best;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.kind != y.kind || x.args.size() != y.args.size()) return false;
  switch (x.kind) {
    case Expr::Kind::kNumber:
    case Expr::Kind::kPow:
      if (x.value != y.value) return false;
      break;
    case Expr::Kind::kVar:
      if (x.var != y.var) return false;
      break;
    case Expr::Kind::kCall:
      if (x.func != y.func) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < x.args.size(); ++i) {
    if (!(x.args[i] == y.args[i])) return false;
  }
  return true;
}

template <typename T>
T Expr::evaluate(std::span<const T> x) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::kNumber: return T(n.value);
    case Kind::kVar:
      if (n.var < 0 || static_cast<std::size_t>(n.var) >= x.size()) {
        throw DimensionError("variable x" + std::to_string(n.var + 1) +
                             " not bound at evaluation point of dimension " +
                             std::to_string(x.size()));
      }
      return x[n.var];
    case Kind::kNeg: return -n.args[0].evaluate(x);
    case Kind::kAdd: return n.args[0].evaluate(x) + n.args[1].evaluate(x);
    case Kind::kSub: return n.args[0].evaluate(x) - n.args[1].evaluate(x);
    case Kind::kMul: return n.args[0].evaluate(x) * n.args[1].evaluate(x);
    case Kind::kDiv: {
      T den = n.args[1].evaluate(x);
      if (primal(den) == 0.0) throw DomainError(-1, "division by zero");
      return n.args[0].evaluate(x) / den;
    }
    case Kind::kPow: return power(n.args[0].evaluate(x), n.value);
    case Kind::kCall: return apply_func(n.func, n.args[0].evaluate(x));
  }
  return T(0.0);
}

template double Expr::evaluate<double>(std::span<const double>) const;
template Dual1 Expr::evaluate<Dual1>(std::span<const Dual1>) const;
template Dual2 Expr::evaluate<Dual2>(std::span<const Dual2>) const;
template Dual3 Expr::evaluate<Dual3>(std::span<const Dual3>) const;

Expr parse(std::string_view source, int n) {
  if (n < 0) throw DimensionError("dimension must be non-negative");
  return Parser(source, n).parse_all();
}

std::string unparse(const Expr& e) {
  std::string out;
  unparse_into(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// SmoothMap

SmoothMap::SmoothMap(int dim_in, std::vector<Expr> components)
    : dim_in_(dim_in), components_(std::move(components)) {
  if (dim_in_ < 1) throw DimensionError("SmoothMap needs dim_in >= 1");
  for (const auto& c : components_) {
    if (c.max_var() >= dim_in_) {
      throw DimensionError("expression references x" +
                           std::to_string(c.max_var() + 1) +
                           " beyond dimension " + std::to_string(dim_in_));
    }
  }
}

SmoothMap SmoothMap::parse(const std::vector<std::string>& sources, int n) {
  std::vector<Expr> comps;
  comps.reserve(sources.size());
  for (const auto& s : sources) comps.push_back(expr::parse(s, n));
  return SmoothMap(n, std::move(comps));
}

SmoothMap SmoothMap::parse_scalar(std::string_view source, int n) {
  return SmoothMap(n, {expr::parse(source, n)});
}

SmoothMap SmoothMap::identity(int n) {
  std::vector<Expr> comps;
  for (int i = 0; i < n; ++i) comps.push_back(Expr::var(i));
  return SmoothMap(n, std::move(comps));
}

SmoothMap SmoothMap::constant(const Eigen::VectorXd& value, int n) {
  std::vector<Expr> comps;
  for (Eigen::Index i = 0; i < value.size(); ++i) {
    comps.push_back(Expr::number(value[i]));
  }
  return SmoothMap(n, std::move(comps));
}

template <typename T>
std::vector<T> SmoothMap::eval_as(std::span<const T> x) const {
  if (static_cast<int>(x.size()) != dim_in_) {
    throw DimensionError("evaluation point has dimension " +
                         std::to_string(x.size()) + ", expected " +
                         std::to_string(dim_in_));
  }
  std::vector<T> out;
  out.reserve(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    try {
      T v = components_[i].evaluate(x);
      if (!all_finite(v)) throw DomainError(-1, "non-finite result");
      out.push_back(v);
    } catch (const DomainError& e) {
      if (e.component() >= 0) throw;
      throw DomainError(static_cast<int>(i), e.what());
    }
  }
  return out;
}

template std::vector<double> SmoothMap::eval_as(std::span<const double>) const;
template std::vector<Dual1> SmoothMap::eval_as(std::span<const Dual1>) const;
template std::vector<Dual2> SmoothMap::eval_as(std::span<const Dual2>) const;
template std::vector<Dual3> SmoothMap::eval_as(std::span<const Dual3>) const;

Eigen::VectorXd SmoothMap::operator()(const Eigen::VectorXd& x) const {
  const auto v = eval_as<double>(std::span<const double>(x.data(), x.size()));
  return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
}

Eigen::VectorXd eval(const SmoothMap& m, const Eigen::VectorXd& x) {
  return m(x);
}

namespace {

std::vector<Dual1> seed(const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
  std::vector<Dual1> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = Dual1(x[i], v[i]);
  return out;
}

void check_dim(const char* what, Eigen::Index got, int expected) {
  if (got != expected) {
    throw DimensionError(std::string(what) + " has dimension " +
                         std::to_string(got) + ", expected " +
                         std::to_string(expected));
  }
}

}  // namespace

Eigen::VectorXd directional(const SmoothMap& m, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& v) {
  check_dim("direction", v.size(), m.dim_in());
  check_dim("point", x.size(), m.dim_in());
  const auto xs = seed(x, v);
  const auto out = m.eval_as<Dual1>(xs);
  Eigen::VectorXd jv(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) jv[i] = out[i].eps;
  return jv;
}

Eigen::MatrixXd jacobian(const SmoothMap& m, const Eigen::VectorXd& x) {
  check_dim("point", x.size(), m.dim_in());
  const int n = m.dim_in();
  Eigen::MatrixXd jac(m.dim_out(), n);
  for (int j = 0; j < n; ++j) {
    jac.col(j) = directional(m, x, Eigen::VectorXd::Unit(n, j));
  }
  return jac;
}

Eigen::VectorXd gradient(const SmoothMap& s, const Eigen::VectorXd& x) {
  if (s.dim_out() != 1) throw DimensionError("gradient needs a scalar map");
  return jacobian(s, x).transpose();
}

Eigen::MatrixXd hessian(const SmoothMap& s, const Eigen::VectorXd& x) {
  if (s.dim_out() != 1) throw DimensionError("hessian needs a scalar map");
  check_dim("point", x.size(), s.dim_in());
  const int n = s.dim_in();
  Eigen::MatrixXd hess(n, n);
  std::vector<Dual2> xs(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      for (int k = 0; k < n; ++k) {
        xs[k] = Dual2(Dual1(x[k], k == i ? 1.0 : 0.0),
                      Dual1(k == j ? 1.0 : 0.0, 0.0));
      }
      const double hij = s.eval_as<Dual2>(xs)[0].eps.eps;
      hess(i, j) = hij;
      hess(j, i) = hij;
    }
  }
  hess = 0.5 * (hess + hess.transpose()).eval();
  return hess;
}

// ---------------------------------------------------------------------------
// MatrixMap

MatrixMap::MatrixMap(int dim_in, int rows, int cols,
                     std::vector<Expr> row_major)
    : dim_in_(dim_in), rows_(rows), cols_(cols), entries_(std::move(row_major)) {
  if (static_cast<int>(entries_.size()) != rows_ * cols_) {
    throw DimensionError("matrix field entry count mismatch");
  }
  for (const auto& e : entries_) {
    if (e.max_var() >= dim_in_) {
      throw DimensionError("matrix field entry references x" +
                           std::to_string(e.max_var() + 1) +
                           " beyond dimension " + std::to_string(dim_in_));
    }
  }
}

MatrixMap MatrixMap::parse(const std::vector<std::vector<std::string>>& grid,
                           int n) {
  const int rows = static_cast<int>(grid.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(grid[0].size());
  std::vector<Expr> entries;
  for (const auto& row : grid) {
    if (static_cast<int>(row.size()) != cols) {
      throw DimensionError("ragged matrix grid");
    }
    for (const auto& s : row) entries.push_back(expr::parse(s, n));
  }
  return MatrixMap(n, rows, cols, std::move(entries));
}

MatrixMap MatrixMap::constant(const Eigen::MatrixXd& value, int n) {
  std::vector<Expr> entries;
  for (Eigen::Index i = 0; i < value.rows(); ++i) {
    for (Eigen::Index j = 0; j < value.cols(); ++j) {
      entries.push_back(Expr::number(value(i, j)));
    }
  }
  return MatrixMap(n, static_cast<int>(value.rows()),
                   static_cast<int>(value.cols()), std::move(entries));
}

Eigen::MatrixXd MatrixMap::operator()(const Eigen::VectorXd& x) const {
  check_dim("point", x.size(), dim_in_);
  const std::span<const double> xs(x.data(), x.size());
  Eigen::MatrixXd out(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      try {
        out(i, j) = entry(i, j).evaluate(xs);
      } catch (const DomainError& e) {
        throw DomainError(i * cols_ + j, e.what());
      }
      if (!std::isfinite(out(i, j))) {
        throw DomainError(i * cols_ + j, "non-finite result");
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// MetricField

MetricField MetricField::from_lower(std::vector<std::vector<Expr>> lower,
                                    int n) {
  if (static_cast<int>(lower.size()) != n) {
    throw DimensionError("metric field needs " + std::to_string(n) +
                         " lower-triangle rows, got " +
                         std::to_string(lower.size()));
  }
  MetricField field(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(lower[i].size()) != i + 1) {
      throw DimensionError("metric field row " + std::to_string(i + 1) +
                           " must have " + std::to_string(i + 1) +
                           " entries (lower triangle)");
    }
    for (auto& e : lower[i]) {
      if (e.max_var() >= n) {
        throw DimensionError("metric field entry references x" +
                             std::to_string(e.max_var() + 1) +
                             " beyond dimension " + std::to_string(n));
      }
      field.lower_.push_back(std::move(e));
    }
  }
  return field;
}

MetricField MetricField::parse_lower(
    const std::vector<std::vector<std::string>>& lower, int n) {
  std::vector<std::vector<Expr>> grid;
  for (const auto& row : lower) {
    std::vector<Expr> r;
    for (const auto& s : row) r.push_back(expr::parse(s, n));
    grid.push_back(std::move(r));
  }
  return from_lower(std::move(grid), n);
}

MetricField MetricField::constant(const Eigen::MatrixXd& value) {
  const int n = static_cast<int>(value.rows());
  if (value.cols() != n) throw DimensionError("metric must be square");
  std::vector<std::vector<Expr>> grid(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) grid[i].push_back(Expr::number(value(i, j)));
  }
  return from_lower(std::move(grid), n);
}

MetricField MetricField::hessian_of(SmoothMap potential) {
  if (potential.dim_out() != 1) {
    throw DimensionError("generating function must be scalar");
  }
  MetricField field(potential.dim_in());
  field.potential_ = std::make_shared<const SmoothMap>(std::move(potential));
  return field;
}

const Expr& MetricField::lower_entry(int i, int j) const {
  if (is_hessian()) throw Error("Hessian metric has no expression entries");
  if (j > i) std::swap(i, j);
  return lower_.at(i * (i + 1) / 2 + j);
}

template <typename T>
T MetricField::entry_as(int i, int j, std::span<const T> x) const {
  if (j > i) std::swap(i, j);
  const int flat = i * (i + 1) / 2 + j;
  try {
    if (!is_hessian()) {
      T v = lower_[flat].evaluate(x);
      if (!all_finite(v)) throw DomainError(-1, "non-finite result");
      return v;
    }
    // Second partial d^2 P / dx_i dx_j on two extra nesting levels.
    std::vector<Dual<Dual<T>>> xs(n_);
    for (int k = 0; k < n_; ++k) {
      xs[k] = Dual<Dual<T>>(Dual<T>(x[k], T(k == i ? 1.0 : 0.0)),
                            Dual<T>(T(k == j ? 1.0 : 0.0), T(0.0)));
    }
    const auto r = potential_->component(0).evaluate(
        std::span<const Dual<Dual<T>>>(xs));
    if (!all_finite(r)) throw DomainError(-1, "non-finite result");
    return r.eps.eps;
  } catch (const DomainError& e) {
    if (e.component() >= 0) throw;
    throw DomainError(flat, e.what());
  }
}

Eigen::MatrixXd MetricField::operator()(const Eigen::VectorXd& x) const {
  check_dim("point", x.size(), n_);
  const std::span<const double> xs(x.data(), x.size());
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = entry_as<double>(i, j, xs);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Eigen::MatrixXd MetricField::directional(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& v) const {
  check_dim("point", x.size(), n_);
  check_dim("direction", v.size(), n_);
  const auto xs = seed(x, v);
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double d = entry_as<Dual1>(i, j, std::span<const Dual1>(xs)).eps;
      out(i, j) = d;
      out(j, i) = d;
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> MetricField::partials(
    const Eigen::VectorXd& x) const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(n_);
  for (int k = 0; k < n_; ++k) {
    out.push_back(directional(x, Eigen::VectorXd::Unit(n_, k)));
  }
  return out;
}

Eigen::MatrixXd matfield_directional(const MetricField& pi,
                                     const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& v) {
  return pi.directional(x, v);
}

}  // namespace varlift::expr
