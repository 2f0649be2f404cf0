#include "shrimplab/maps.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "shrimplab/errors.hpp"

namespace shrimplab {

std::size_t family_arity(Family f) {
  switch (f) {
    case Family::Parabola:
      return 1;
    case Family::CubicPlus:
    case Family::CubicMinus:
    case Family::DoubleParabola:
      return 2;
    case Family::Shrimp3:
      return 3;
  }
  return 0;
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Parabola:
      return "parabola";
    case Family::CubicPlus:
      return "cubic_plus";
    case Family::CubicMinus:
      return "cubic_minus";
    case Family::DoubleParabola:
      return "double_parabola";
    case Family::Shrimp3:
      return "shrimp3";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::Parabola, Family::CubicPlus, Family::CubicMinus, Family::DoubleParabola,
                   Family::Shrimp3}) {
    if (family_name(f) == name) return f;
  }
  throw InvalidArgument("unknown map family '" + std::string(name) + "'");
}

ModelMap::ModelMap(Family family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
  if (params_.size() != family_arity(family_)) {
    throw InvalidArgument(std::string(family_name(family_)) + " takes " +
                          std::to_string(family_arity(family_)) + " parameters, got " +
                          std::to_string(params_.size()));
  }
  for (double p : params_) {
    if (!std::isfinite(p)) throw InvalidArgument("map parameter is not finite");
  }
}

ModelMap ModelMap::with_param(std::size_t i, double value) const {
  std::vector<double> p = params_;
  p.at(i) = value;
  return ModelMap(family_, std::move(p));
}

double family_derivative(Family f, const double* p, double y) {
  switch (f) {
    case Family::Parabola:
      return -2.0 * y;
    case Family::CubicPlus:
      return p[1] + 3.0 * (y * y);
    case Family::CubicMinus:
      return p[1] - 3.0 * (y * y);
    case Family::DoubleParabola: {
      const double t = p[0] - y * y;
      return (4.0 * y) * t;
    }
    case Family::Shrimp3: {
      const double t = p[0] - y * y;
      return (4.0 * y) * t + p[2];
    }
  }
  return 0.0;
}

double eval_map(const ModelMap& map, double y) {
  if (!std::isfinite(y)) throw InvalidArgument("eval_map: state is not finite");
  return evaluate_family(map.family(), map.params().data(), y);
}

Taylor<4> eval_taylor(const ModelMap& map, double y) {
  if (!std::isfinite(y)) throw InvalidArgument("eval_taylor: state is not finite");
  return evaluate_family(map.family(), map.params().data(), Taylor<4>::variable(y));
}

Jet eval_jet(const ModelMap& map, double y, int order) {
  if (order < 1 || order > kMaxJetOrder) {
    throw InvalidArgument("eval_jet: order must be in 1..4, got " + std::to_string(order));
  }
  const Taylor<4> t = eval_taylor(map, y);
  Jet jet;
  jet.value = t.value();
  jet.order = order;
  for (int i = 1; i <= order; ++i) {
    jet.derivs[static_cast<std::size_t>(i - 1)] = t.derivative(static_cast<std::size_t>(i));
  }
  return jet;
}

IterateResult iterate_n(const ModelMap& map, double y0, int n, double escape_radius) {
  if (n < 1) throw InvalidArgument("iterate_n: n must be >= 1");
  if (!std::isfinite(y0)) throw InvalidArgument("iterate_n: initial state is not finite");
  const double* p = map.params().data();
  IterateResult r{y0, 1.0};
  for (int i = 0; i < n; ++i) {
    r.deriv_product *= family_derivative(map.family(), p, r.y);
    r.y = evaluate_family(map.family(), p, r.y);
    if (!(std::abs(r.y) <= escape_radius)) {
      throw EscapeError("orbit left radius " + std::to_string(escape_radius) + " at step " +
                            std::to_string(i + 1),
                        i + 1);
    }
  }
  return r;
}

}  // namespace shrimplab
