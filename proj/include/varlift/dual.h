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

// Forward-mode dual numbers. A Dual<T> carries a value and a single
// directional derivative; nesting Dual<Dual<double>> yields mixed second
// derivatives, Dual<Dual<Dual<double>>> third derivatives.

#include <cmath>
#include <type_traits>

namespace varlift {

template <typename T>
struct Dual {
  T val{};
  T eps{};

  constexpr Dual() = default;
  constexpr Dual(double v) : val(v), eps(0.0) {}  // NOLINT: implicit lift
  constexpr Dual(T v, T e) : val(v), eps(e) {}

  Dual& operator+=(const Dual& o) {
    val += o.val;
    eps += o.eps;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    val -= o.val;
    eps -= o.eps;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    eps = eps * o.val + val * o.eps;
    val *= o.val;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    val /= o.val;
    eps = (eps - val * o.eps) / o.val;
    return *this;
  }
};

template <typename T>
struct is_dual : std::false_type {};
template <typename T>
struct is_dual<Dual<T>> : std::true_type {};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual1>;
using Dual3 = Dual<Dual2>;

/// Underlying real value of a (possibly nested) dual number.
inline double primal(double v) { return v; }
template <typename T>
double primal(const Dual<T>& d) {
  return primal(d.val);
}

/// True if every coefficient of the nested number is finite.
inline bool all_finite(double v) { return std::isfinite(v); }
template <typename T>
bool all_finite(const Dual<T>& d) {
  return all_finite(d.val) && all_finite(d.eps);
}

template <typename T>
Dual<T> operator+(Dual<T> a, const Dual<T>& b) {
  return a += b;
}
template <typename T>
Dual<T> operator-(Dual<T> a, const Dual<T>& b) {
  return a -= b;
}
template <typename T>
Dual<T> operator*(Dual<T> a, const Dual<T>& b) {
  return a *= b;
}
template <typename T>
Dual<T> operator/(Dual<T> a, const Dual<T>& b) {
  return a /= b;
}
template <typename T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.val, -a.eps};
}

template <typename T>
Dual<T> operator*(double s, const Dual<T>& a) {
  return {s * a.val, s * a.eps};
}
template <typename T>
Dual<T> operator*(const Dual<T>& a, double s) {
  return s * a;
}

template <typename T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.val), cos(a.val) * a.eps};
}
template <typename T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.val), -(sin(a.val) * a.eps)};
}
template <typename T>
Dual<T> tan(const Dual<T>& a) {
  using std::tan;
  const T t = tan(a.val);
  return {t, (T(1.0) + t * t) * a.eps};
}
template <typename T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  const T e = exp(a.val);
  return {e, e * a.eps};
}
template <typename T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.val), a.eps / a.val};
}
template <typename T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  const T s = sqrt(a.val);
  return {s, a.eps / (2.0 * s)};
}
template <typename T>
Dual<T> tanh(const Dual<T>& a) {
  using std::tanh;
  const T t = tanh(a.val);
  return {t, (T(1.0) - t * t) * a.eps};
}
/// |a| with derivative sign(a); the derivative at 0 is taken as 0.
template <typename T>
Dual<T> abs(const Dual<T>& a) {
  const double v = primal(a.val);
  if (v > 0.0) return a;
  if (v < 0.0) return -a;
  return {a.val, T(0.0)};
}
/// a^c for a real constant exponent.
template <typename T>
Dual<T> pow(const Dual<T>& a, double c) {
  using std::pow;
  if (c == 0.0) return Dual<T>(1.0);
  if (c == 1.0) return a;
  return {pow(a.val, c), c * pow(a.val, c - 1.0) * a.eps};
}

}  // namespace varlift
