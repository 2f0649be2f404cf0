#include "shrimplab/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>

#include "shrimplab/errors.hpp"

namespace shrimplab {

namespace {

constexpr double kOrbitResidual = 1e-10;
constexpr double kDistinctTol = 1e-6;

double sign_of(BifKind kind) {
  switch (kind) {
    case BifKind::SN:
    case BifKind::Cusp:
      return 1.0;
    case BifKind::PD:
    case BifKind::DegenerateFlip:
      return -1.0;
  }
  return 1.0;
}

bool is_fold(BifKind kind) { return kind == BifKind::SN || kind == BifKind::Cusp; }

double flip_coefficient(const Taylor<4>& g) {
  const double g2 = g.derivative(2);
  const double g3 = g.derivative(3);
  return 0.25 * g2 * g2 + g3 / 6.0;
}

// Defining system F = (g - Y, g' - s) and its Jacobian columns for (Y, p_i, p_j).
struct SystemEval {
  std::array<double, 2> F{};
  std::array<std::array<double, 3>, 2> J{};
  Taylor<4> jet;
};

SystemEval eval_system(const JetMap& map, std::vector<double> params, int period, double s,
                       std::size_t pi, std::size_t pj, double y, bool two_params) {
  SystemEval out;
  out.jet = iterate_jet(map, params, y, period);
  out.F = {out.jet.value() - y, out.jet.derivative(1) - s};
  out.J[0][0] = out.jet.derivative(1) - 1.0;
  out.J[1][0] = out.jet.derivative(2);
  const std::size_t idx[2] = {pi, pj};
  for (int c = 0; c < (two_params ? 2 : 1); ++c) {
    const std::size_t k = idx[c];
    const double p0 = params[k];
    const double h = 1e-6 * (1.0 + std::abs(p0));
    params[k] = p0 + h;
    const Taylor<4> up = iterate_jet(map, params, y, period);
    params[k] = p0 - h;
    const Taylor<4> dn = iterate_jet(map, params, y, period);
    params[k] = p0;
    out.J[0][1 + c] = (up.value() - dn.value()) / (2.0 * h);
    out.J[1][1 + c] = (up.derivative(1) - dn.derivative(1)) / (2.0 * h);
  }
  return out;
}

bool all_finite3(const std::array<double, 3>& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

// Solves a 3x3 system by Gaussian elimination with partial pivoting.
bool solve3(std::array<std::array<double, 3>, 3> A, std::array<double, 3> b,
            std::array<double, 3>& x) {
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r) {
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    }
    if (A[piv][c] == 0.0 || !std::isfinite(A[piv][c])) return false;
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < 3; ++r) {
      const double f = A[r][c] / A[c][c];
      for (int k = c; k < 3; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < 3; ++k) s -= A[r][k] * x[k];
    x[r] = s / A[r][r];
  }
  return all_finite3(x);
}

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm3(const std::array<double, 3>& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

struct CurveContext {
  const JetMap& map;
  std::vector<double> params;
  int period;
  double s;
  std::size_t pi, pj;

  std::vector<double> params_at(const std::array<double, 3>& u) const {
    std::vector<double> p = params;
    p[pi] = u[1];
    p[pj] = u[2];
    return p;
  }
};

// Newton for F(u) = 0 with the extra condition n . (u - anchor) = 0.
std::optional<std::array<double, 3>> correct(const CurveContext& ctx, std::array<double, 3> u,
                                             const std::array<double, 3>& anchor,
                                             const std::array<double, 3>& n, int max_iter = 12) {
  for (int it = 0; it < max_iter; ++it) {
    SystemEval e;
    try {
      e = eval_system(ctx.map, ctx.params_at(u), ctx.period, ctx.s, ctx.pi, ctx.pj, u[0], true);
    } catch (const Error&) {
      return std::nullopt;
    }
    std::array<std::array<double, 3>, 3> A{{{e.J[0][0], e.J[0][1], e.J[0][2]},
                                            {e.J[1][0], e.J[1][1], e.J[1][2]},
                                            {n[0], n[1], n[2]}}};
    const double c = n[0] * (u[0] - anchor[0]) + n[1] * (u[1] - anchor[1]) +
                     n[2] * (u[2] - anchor[2]);
    std::array<double, 3> rhs{-e.F[0], -e.F[1], -c};
    std::array<double, 3> du{};
    if (!solve3(A, rhs, du)) return std::nullopt;
    for (int i = 0; i < 3; ++i) u[i] += du[i];
    if (!all_finite3(u)) return std::nullopt;
    if (norm3(du) <= kNewtonTol * (1.0 + norm3(u))) {
      try {
        const SystemEval f =
            eval_system(ctx.map, ctx.params_at(u), ctx.period, ctx.s, ctx.pi, ctx.pj, u[0], false);
        if (std::abs(f.F[0]) <= kOrbitResidual && std::abs(f.F[1]) <= 1e-8) return u;
      } catch (const Error&) {
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::array<double, 3> tangent_at(const CurveContext& ctx, const std::array<double, 3>& u) {
  const SystemEval e =
      eval_system(ctx.map, ctx.params_at(u), ctx.period, ctx.s, ctx.pi, ctx.pj, u[0], true);
  std::array<double, 3> t = cross(e.J[0], e.J[1]);
  const double n = norm3(t);
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("continuation: singular tangent");
  for (double& v : t) v /= n;
  return t;
}

CurvePoint make_point(const CurveContext& ctx, const std::array<double, 3>& u) {
  CurvePoint p;
  p.params = ctx.params_at(u);
  p.Y = u[0];
  const Taylor<4> g = iterate_jet(ctx.map, p.params, u[0], ctx.period);
  p.multiplier = g.derivative(1);
  p.g2 = g.derivative(2);
  p.l1 = flip_coefficient(g);
  return p;
}

BifPoint make_bif_point(const JetMap& map, BifKind kind, int period,
                        const std::vector<double>& params, double y) {
  const Taylor<4> g = iterate_jet(map, params, y, period);
  BifPoint b;
  b.kind = kind;
  b.orbit.period = period;
  b.orbit.Y = y;
  b.orbit.multiplier = g.derivative(1);
  b.orbit.params = params;
  b.test_values["residual"] = g.value() - y;
  b.test_values["multiplier_residual"] = g.derivative(1) - sign_of(kind);
  b.test_values["g2"] = g.derivative(2);
  b.test_values["l1"] = flip_coefficient(g);
  return b;
}

}  // namespace

ModelJetMap::ModelJetMap(Family family, std::size_t dummy_params)
    : family_(family), dummies_(dummy_params) {}

Taylor<4> ModelJetMap::eval(double y, const std::vector<double>& params) const {
  if (params.size() != param_count()) {
    throw InvalidArgument("ModelJetMap: expected " + std::to_string(param_count()) +
                          " parameters");
  }
  if (!std::isfinite(y)) throw EscapeError("ModelJetMap: state is not finite", 0);
  return evaluate_family(family_, params.data(), Taylor<4>::variable(y));
}

std::string ModelJetMap::describe() const {
  std::string s(family_name(family_));
  if (dummies_ > 0) s += "+" + std::to_string(dummies_) + " dummy";
  return s;
}

ReducedReturnMap::ReducedReturnMap(ReturnMapConfig cfg)
    : cfg_(std::move(cfg)), frame_(rescale_frame(cfg_)) {}

Taylor<4> ReducedReturnMap::eval(double y, const std::vector<double>& params) const {
  if (params.size() != 2) throw InvalidArgument("ReducedReturnMap: expected (M1, M2)");
  using T = Taylor<4>;
  const T Y = T::variable(y);
  std::array<T, 2> X{T(0.0), T(0.0)};
  for (int it = 0; it < 100; ++it) {
    const RescaledStateT<T> s = rescaled_step<T>(cfg_, frame_, X, Y, params[0], params[1]);
    const double change = std::max(magnitude(s.X[0] - X[0]), magnitude(s.X[1] - X[1]));
    const double scale = std::max(magnitude(s.X[0]), magnitude(s.X[1]));
    X = s.X;
    if (!std::isfinite(change)) break;
    if (change <= 1e-15 * (1.0 + scale)) {
      return rescaled_step<T>(cfg_, frame_, X, Y, params[0], params[1]).Y;
    }
  }
  throw NumericalError("ReducedReturnMap: slaved coordinate did not converge");
}

std::string ReducedReturnMap::describe() const {
  return "reduced return map k=" + std::to_string(cfg_.k) + " m=" + std::to_string(cfg_.m);
}

Taylor<4> iterate_jet(const JetMap& map, const std::vector<double>& params, double y, int n) {
  if (n < 1) throw InvalidArgument("iterate_jet: period must be >= 1");
  Taylor<4> g = map.eval(y, params);
  for (int i = 1; i < n; ++i) {
    if (!all_finite(g)) throw EscapeError("iterate_jet: orbit is not finite", i);
    g = compose(map.eval(g.value(), params), g);
  }
  if (!all_finite(g)) throw EscapeError("iterate_jet: orbit is not finite", n);
  return g;
}

std::string_view bif_kind_name(BifKind k) {
  switch (k) {
    case BifKind::SN:
      return "SN";
    case BifKind::PD:
      return "PD";
    case BifKind::Cusp:
      return "cusp";
    case BifKind::DegenerateFlip:
      return "degenerate_flip";
  }
  return "?";
}

PeriodicOrbit find_periodic_orbit(const JetMap& map, const std::vector<double>& params,
                                  int period, double y_guess) {
  if (period < 1) throw InvalidArgument("find_periodic_orbit: period must be >= 1");
  double y = y_guess;
  bool converged = false;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const Taylor<4> g = iterate_jet(map, params, y, period);
    const double f = g.value() - y;
    const double df = g.derivative(1) - 1.0;
    if (f == 0.0) {
      converged = true;
      break;
    }
    if (df == 0.0) throw NumericalError("find_periodic_orbit: singular Newton step (multiplier 1)");
    const double step = f / df;
    y -= step;
    if (!std::isfinite(y)) break;
    if (std::abs(step) <= kNewtonTol * (1.0 + std::abs(y))) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericalError("find_periodic_orbit: Newton did not converge");
  const Taylor<4> g = iterate_jet(map, params, y, period);
  if (!(std::abs(g.value() - y) <= kOrbitResidual)) {
    throw NumericalError("find_periodic_orbit: residual above tolerance");
  }
  for (int d = 1; d < period; ++d) {
    if (period % d != 0) continue;
    if (std::abs(iterate_jet(map, params, y, d).value() - y) <= kDistinctTol) {
      throw NumericalError("find_periodic_orbit: orbit has period " + std::to_string(d) +
                           ", a divisor of " + std::to_string(period));
    }
  }
  return PeriodicOrbit{period, y, g.derivative(1), params};
}

BifPoint solve_codim1(const JetMap& map, const std::vector<double>& params, int period,
                      BifKind kind, std::size_t free_param, double y_guess, double p_guess) {
  if (kind != BifKind::SN && kind != BifKind::PD) {
    throw InvalidArgument("solve_codim1: kind must be SN or PD");
  }
  if (free_param >= params.size()) throw InvalidArgument("solve_codim1: free_param out of range");
  if (period < 1) throw InvalidArgument("solve_codim1: period must be >= 1");
  const double s = sign_of(kind);
  std::vector<double> p = params;
  p[free_param] = p_guess;
  double y = y_guess;
  bool converged = false;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const SystemEval e = eval_system(map, p, period, s, free_param, free_param, y, false);
    const double a = e.J[0][0], b = e.J[0][1], c = e.J[1][0], d = e.J[1][1];
    const double det = a * d - b * c;
    if (det == 0.0 || !std::isfinite(det)) {
      throw NumericalError("solve_codim1: singular bordered Jacobian");
    }
    const double dy = (-e.F[0] * d + e.F[1] * b) / det;
    const double dp = (-a * e.F[1] + c * e.F[0]) / det;
    y += dy;
    p[free_param] += dp;
    if (!std::isfinite(y) || !std::isfinite(p[free_param])) break;
    if (std::abs(dy) <= kNewtonTol * (1.0 + std::abs(y)) &&
        std::abs(dp) <= kNewtonTol * (1.0 + std::abs(p[free_param]))) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericalError("solve_codim1: Newton did not converge");
  BifPoint bp = make_bif_point(map, kind, period, p, y);
  if (!(std::abs(bp.test_values["residual"]) <= kOrbitResidual) ||
      !(std::abs(bp.test_values["multiplier_residual"]) <= 1e-8)) {
    throw NumericalError("solve_codim1: converged point fails the defining system");
  }
  return bp;
}

BifCurve continue_codim1(const JetMap& map, const BifPoint& start, std::size_t param_i,
                         std::size_t param_j, const ContinuationOptions& opts) {
  if (start.kind != BifKind::SN && start.kind != BifKind::PD) {
    throw InvalidArgument("continue_codim1: start must be an SN or PD point");
  }
  if (param_i == param_j) throw InvalidArgument("continue_codim1: plane parameters must differ");
  const std::vector<double>& base = start.orbit.params;
  if (param_i >= base.size() || param_j >= base.size()) {
    throw InvalidArgument("continue_codim1: parameter index out of range");
  }
  CurveContext ctx{map, base, start.orbit.period, sign_of(start.kind), param_i, param_j};
  BifCurve curve;
  curve.kind = start.kind;
  curve.period = start.orbit.period;
  curve.param_i = param_i;
  curve.param_j = param_j;

  std::array<double, 3> u{start.orbit.Y, base[param_i], base[param_j]};
  curve.points.push_back(make_point(ctx, u));
  std::array<double, 3> t = tangent_at(ctx, u);
  if (opts.direction < 0) {
    for (double& v : t) v = -v;
  }
  double h = std::clamp(opts.step, opts.min_step, opts.max_step);
  auto inside = [&](const std::array<double, 3>& v) {
    return std::abs(v[0]) <= opts.y_bound && v[1] >= opts.bounds[0] && v[1] <= opts.bounds[1] &&
           v[2] >= opts.bounds[2] && v[2] <= opts.bounds[3];
  };
  curve.stop = StopReason::MaxPoints;
  while (static_cast<int>(curve.points.size()) < opts.max_points) {
    std::array<double, 3> pred{u[0] + h * t[0], u[1] + h * t[1], u[2] + h * t[2]};
    std::optional<std::array<double, 3>> next = correct(ctx, pred, pred, t);
    std::array<double, 3> tn{};
    bool ok = false;
    if (next) {
      const std::array<double, 3> d{(*next)[0] - u[0], (*next)[1] - u[1], (*next)[2] - u[2]};
      if (norm3(d) <= 2.0 * h) {
        try {
          tn = tangent_at(ctx, *next);
          if (tn[0] * t[0] + tn[1] * t[1] + tn[2] * t[2] < 0.0) {
            for (double& v : tn) v = -v;
          }
          ok = tn[0] * t[0] + tn[1] * t[1] + tn[2] * t[2] > 0.5;
        } catch (const Error&) {
          ok = false;
        }
      }
    }
    if (!ok) {
      h *= 0.5;
      if (h < opts.min_step) {
        curve.stop = StopReason::StepUnderflow;
        break;
      }
      continue;
    }
    if (!inside(*next)) {
      curve.stop = StopReason::Boundary;
      break;
    }
    u = *next;
    t = tn;
    curve.points.push_back(make_point(ctx, u));
    h = std::min(h * 1.3, opts.max_step);
  }
  if (curve.points.size() < 2 && curve.stop == StopReason::StepUnderflow) {
    throw NumericalError("continue_codim1: step size underflow before the first step");
  }
  curve.codim2_hits = detect_codim2(map, curve);
  return curve;
}

double lyapunov_value_1(const JetMap& map, const BifPoint& pd_point) {
  const PeriodicOrbit& o = pd_point.orbit;
  const Taylor<4> g = iterate_jet(map, o.params, o.Y, o.period);
  if (!(std::abs(g.derivative(1) + 1.0) <= 1e-6)) {
    throw InvalidArgument("lyapunov_value_1: multiplier is not -1");
  }
  return flip_coefficient(g);
}

std::vector<BifPoint> detect_codim2(const JetMap& map, const BifCurve& curve) {
  std::vector<BifPoint> hits;
  if (curve.points.size() < 3) return hits;
  const bool fold = is_fold(curve.kind);
  const BifKind hit_kind = fold ? BifKind::Cusp : BifKind::DegenerateFlip;
  const CurvePoint& first = curve.points.front();
  CurveContext ctx{map, first.params, curve.period, sign_of(curve.kind), curve.param_i,
                   curve.param_j};
  auto test = [&](const std::array<double, 3>& u) {
    const CurvePoint p = make_point(ctx, u);
    return fold ? p.g2 : p.l1;
  };
  auto as_u = [&](const CurvePoint& p) {
    return std::array<double, 3>{p.Y, p.params[curve.param_i], p.params[curve.param_j]};
  };
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const CurvePoint& a = curve.points[i];
    const CurvePoint& b = curve.points[i + 1];
    const double fa = fold ? a.g2 : a.l1;
    const double fb = fold ? b.g2 : b.l1;
    std::array<double, 3> ua = as_u(a);
    const std::array<double, 3> ub = as_u(b);
    std::array<double, 3> hit{};
    if (fa == 0.0) {
      hit = ua;
    } else if (fa * fb < 0.0) {
      const std::array<double, 3> dir{ub[0] - ua[0], ub[1] - ua[1], ub[2] - ua[2]};
      double lo = 0.0, hi = 1.0, flo = fa;
      hit = ua;
      const double len = norm3(dir);
      bool failed = false;
      while ((hi - lo) * len > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        const std::array<double, 3> anchor{ua[0] + mid * dir[0], ua[1] + mid * dir[1],
                                           ua[2] + mid * dir[2]};
        const std::optional<std::array<double, 3>> um = correct(ctx, anchor, anchor, dir);
        if (!um) {
          failed = true;
          break;
        }
        const double fm = test(*um);
        hit = *um;
        if (fm == 0.0) break;
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      if (failed) continue;
    } else {
      continue;
    }
    hits.push_back(make_bif_point(map, hit_kind, curve.period, ctx.params_at(hit), hit[0]));
  }
  return hits;
}

void write_curve_csv(std::ostream& out, const BifCurve& curve) {
  out << "kind,period,param_i,param_j,Y,multiplier,g2,l1\n";
  char buf[512];
  for (const CurvePoint& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  std::string(bif_kind_name(curve.kind)).c_str(), curve.period,
                  p.params[curve.param_i], p.params[curve.param_j], p.Y, p.multiplier, p.g2, p.l1);
    out << buf;
  }
}

}  // namespace shrimplab
