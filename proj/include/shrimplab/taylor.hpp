#pragma once

// Truncated univariate Taylor polynomials.
//
// A Taylor<N> holds c[0..N] with c[i] = f^(i)(y0) / i!. Arithmetic on these
// objects propagates exact derivatives through any composition of +, -, *,
// and division by constants, which is all the polynomial model families and
// the truncated normal-form maps need. Taylor<1> is an ordinary dual number.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace shrimplab {

template <std::size_t N>
struct Taylor {
  std::array<double, N + 1> c{};

  constexpr Taylor() = default;
  constexpr Taylor(double v) { c[0] = v; }  // NOLINT: implicit lift of constants

  /// The independent variable expanded around y0.
  static constexpr Taylor variable(double y0) {
    Taylor t(y0);
    if constexpr (N >= 1) t.c[1] = 1.0;
    return t;
  }

  constexpr double value() const { return c[0]; }

  /// i-th derivative (i <= N).
  double derivative(std::size_t i) const {
    double f = 1.0;
    for (std::size_t k = 2; k <= i; ++k) f *= static_cast<double>(k);
    return c[i] * f;
  }

  Taylor& operator+=(const Taylor& o) {
    for (std::size_t i = 0; i <= N; ++i) c[i] += o.c[i];
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    for (std::size_t i = 0; i <= N; ++i) c[i] -= o.c[i];
    return *this;
  }
  Taylor& operator*=(const Taylor& o) {
    *this = *this * o;
    return *this;
  }
  Taylor& operator/=(double s) {
    for (auto& v : c) v /= s;
    return *this;
  }

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator-(Taylor a) {
    for (auto& v : a.c) v = -v;
    return a;
  }
  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor r;
    for (std::size_t i = 0; i <= N; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += a.c[j] * b.c[i - j];
      r.c[i] = s;
    }
    return r;
  }
  friend Taylor operator*(Taylor a, double s) {
    for (auto& v : a.c) v *= s;
    return a;
  }
  friend Taylor operator*(double s, Taylor a) {
    for (auto& v : a.c) v = s * v;
    return a;
  }
  friend Taylor operator/(Taylor a, double s) { return a /= s; }
};

/// Substitutes `inner` into `outer`, where outer is expanded around inner.value().
template <std::size_t N>
Taylor<N> compose(const Taylor<N>& outer, const Taylor<N>& inner) {
  Taylor<N> delta = inner;
  delta.c[0] = 0.0;
  // Horner in delta.
  Taylor<N> r(outer.c[N]);
  for (std::size_t i = N; i-- > 0;) {
    r = r * delta;
    r.c[0] += outer.c[i];
  }
  return r;
}

// Scalar helpers so templated code can treat double and Taylor<N> alike.
inline double value_of(double v) { return v; }
template <std::size_t N>
double value_of(const Taylor<N>& t) {
  return t.c[0];
}

inline double magnitude(double v) { return std::abs(v); }
template <std::size_t N>
double magnitude(const Taylor<N>& t) {
  double m = 0.0;
  for (double v : t.c) m = std::max(m, std::abs(v));
  return m;
}

inline bool all_finite(double v) { return std::isfinite(v); }
template <std::size_t N>
bool all_finite(const Taylor<N>& t) {
  return std::all_of(t.c.begin(), t.c.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace shrimplab
