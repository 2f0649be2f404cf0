#pragma once

// Polynomial limit families of the rescaled return maps.
//
//   Parabola        Y' = M1 - Y^2
//   CubicPlus       Y' = M1 + M2 Y + Y^3
//   CubicMinus      Y' = M1 + M2 Y - Y^3
//   DoubleParabola  Y' = M2 - (M1 - Y^2)^2
//   Shrimp3         Y' = M2 - (M1 - Y^2)^2 + M3 Y
//
// Every family is evaluated through `evaluate_family`, a single template that
// fixes the floating-point operation order. The SIMD orbit kernels mirror the
// same order so that scalar and vector paths round identically.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shrimplab/taylor.hpp"

namespace shrimplab {

enum class Family { Parabola, CubicPlus, CubicMinus, DoubleParabola, Shrimp3 };

/// Number of parameters the family takes.
std::size_t family_arity(Family f);
std::string_view family_name(Family f);
/// Parses names such as "double_parabola"; throws InvalidArgument.
Family parse_family(std::string_view name);

inline constexpr double kDefaultEscapeRadius = 1e6;
inline constexpr int kMaxJetOrder = 4;

class ModelMap {
 public:
  /// Throws InvalidArgument on arity mismatch or non-finite parameters.
  ModelMap(Family family, std::vector<double> params);

  Family family() const { return family_; }
  std::span<const double> params() const { return params_; }
  double param(std::size_t i) const { return params_.at(i); }

  /// Copy with parameter i replaced.
  ModelMap with_param(std::size_t i, double value) const;

 private:
  Family family_;
  std::vector<double> params_;
};

/// Value and derivatives d^i/dY^i for i = 1..order.
struct Jet {
  double value = 0.0;
  std::array<double, kMaxJetOrder> derivs{};
  int order = 0;

  double d(int i) const { return derivs.at(static_cast<std::size_t>(i - 1)); }
};

/// The family polynomial in nested form. `p` must hold family_arity(f) values.
template <typename T>
T evaluate_family(Family f, const double* p, const T& y) {
  switch (f) {
    case Family::Parabola:
      return p[0] - y * y;
    case Family::CubicPlus:
      return (p[0] + p[1] * y) + y * y * y;
    case Family::CubicMinus:
      return (p[0] + p[1] * y) - y * y * y;
    case Family::DoubleParabola: {
      const T t = p[0] - y * y;
      return p[1] - t * t;
    }
    case Family::Shrimp3: {
      const T t = p[0] - y * y;
      return (p[1] - t * t) + p[2] * y;
    }
  }
  return T(0.0);
}

/// First derivative in the operation order shared with the SIMD kernels.
double family_derivative(Family f, const double* p, double y);

/// Throws InvalidArgument on non-finite Y.
double eval_map(const ModelMap& map, double y);

/// Exact derivatives up to `order` (1..4); throws InvalidArgument otherwise.
Jet eval_jet(const ModelMap& map, double y, int order);

/// Taylor expansion of the map at y (order 4).
Taylor<4> eval_taylor(const ModelMap& map, double y);

struct IterateResult {
  double y = 0.0;
  /// Product of first derivatives along the orbit; the multiplier when y == y0.
  double deriv_product = 1.0;
};

/// n-fold composition. Throws EscapeError (stage = step index) when |Y| exceeds
/// the escape radius or becomes non-finite; InvalidArgument if n < 1.
IterateResult iterate_n(const ModelMap& map, double y0, int n,
                        double escape_radius = kDefaultEscapeRadius);

}  // namespace shrimplab
