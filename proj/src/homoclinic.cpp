#include "shrimplab/homoclinic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "shrimplab/errors.hpp"

namespace shrimplab {

namespace {

// Bound on original-coordinate values; beyond it a composition is treated as escaped.
constexpr double kOriginalBound = 1e150;
constexpr int kCrossMaxIter = 200;
constexpr double kCrossResidual = 1e-12;

double ipow(double base, int n) { return std::pow(base, static_cast<double>(n)); }

template <typename T>
bool bounded(const T& v) {
  return all_finite(v) && std::abs(value_of(v)) <= kOriginalBound;
}

template <typename T>
void check_point(const std::array<T, 2>& x, const T& y, std::size_t dim, int stage) {
  bool ok = bounded(y);
  for (std::size_t i = 0; i < dim; ++i) ok = ok && bounded(x[i]);
  if (!ok) throw EscapeError("composition escaped at stage " + std::to_string(stage), stage);
}

// The two excursions in the order they are applied: n1 local steps, global map
// g1, n2 local steps, global map g2. The start point lives in Pi_{g2}+.
struct Legs {
  int n1, n2;
  int g1, g2;
  const GlobalMapTaylor* G1;
  const GlobalMapTaylor* G2;
};

Legs legs_of(const ReturnMapConfig& cfg) {
  if (cfg.ordering == Ordering::KGeqM) return {cfg.k, cfg.m, 1, 2, &cfg.T1, &cfg.T2};
  return {cfg.m, cfg.k, 2, 1, &cfg.T2, &cfg.T1};
}

// A^n x for the linear part.
template <typename T>
std::array<T, 2> linear_power(const LocalNormalForm& L, const std::array<T, 2>& x, int n) {
  std::array<T, 2> r{};
  if (L.kind() == LocalKind::Saddle) {
    const double f = ipow(L.sign_lambda() * L.lambda(), n);
    r[0] = x[0] * f;
    r[1] = x[1];
  } else {
    const double f = ipow(L.lambda(), n);
    const double cs = std::cos(n * L.phi()) * f;
    const double sn = std::sin(n * L.phi()) * f;
    r[0] = x[0] * cs - x[1] * sn;
    r[1] = x[0] * sn + x[1] * cs;
  }
  return r;
}

template <typename T>
void local_step(const LocalNormalForm& L, std::array<T, 2>& x, T& y) {
  if (L.kind() == LocalKind::Saddle) {
    T xn = x[0] * (L.sign_lambda() * L.lambda());
    T yn = y * L.gamma();
    if (L.nonlinearity() == Nonlinearity::TestCubic) {
      xn += x[0] * x[0] * y;
      yn += x[0] * y * y;
    }
    x[0] = xn;
    y = yn;
  } else {
    x = linear_power(L, x, 1);
    y = y * L.gamma();
  }
}

// T0^n applied forward; the linear form uses the closed-form powers.
template <typename T>
void local_power(const LocalNormalForm& L, std::array<T, 2>& x, T& y, int n, int stage) {
  if (L.nonlinearity() == Nonlinearity::Linear) {
    x = linear_power(L, x, n);
    y = y * ipow(L.gamma(), n);
    check_point(x, y, L.x_dim(), stage);
    return;
  }
  for (int i = 0; i < n; ++i) {
    local_step(L, x, y);
    check_point(x, y, L.x_dim(), stage);
  }
}

template <typename T>
void apply_global(const GlobalMapTaylor& G, double mu, std::size_t dim, const std::array<T, 2>& x,
                  const T& y, std::array<T, 2>& xo, T& yo) {
  const T dy = y - G.y_minus;
  std::array<T, 2> r{};
  for (std::size_t i = 0; i < dim; ++i) {
    r[i] = G.x_plus[i] + G.b[i] * dy;
    for (std::size_t j = 0; j < dim; ++j) r[i] += G.a[i][j] * x[j];
  }
  T ny = mu + G.d * (dy * dy);
  for (std::size_t j = 0; j < dim; ++j) ny += G.c[j] * x[j];
  xo = r;
  yo = ny;
}

template <typename T>
CrossSolutionT<T> cross_impl(const LocalNormalForm& L, const std::array<T, 2>& x0, const T& yk,
                             int k) {
  if (k < 1) throw InvalidArgument("cross_form_solve: k must be >= 1");
  CrossSolutionT<T> out;
  if (L.nonlinearity() == Nonlinearity::Linear) {
    out.xk = linear_power(L, x0, k);
    out.y0 = yk * ipow(L.gamma(), -k);
    return out;
  }
  const double a = L.sign_lambda() * L.lambda();
  const double g = L.gamma();
  const auto n = static_cast<std::size_t>(k);
  std::vector<T> xs(n + 1), ys(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    xs[i] = x0[0] * ipow(a, static_cast<int>(i));
    ys[i] = yk * ipow(g, static_cast<int>(i) - k);
  }
  double omega = 1.0;
  double last_residual = HUGE_VAL;
  for (int it = 1; it <= kCrossMaxIter; ++it) {
    double change = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const T nx = xs[i] * a + xs[i] * xs[i] * ys[i];
      change = std::max(change, magnitude(nx - xs[i + 1]));
      xs[i + 1] = nx;
      scale = std::max(scale, magnitude(nx));
    }
    for (std::size_t i = n; i-- > 0;) {
      const T target = (ys[i + 1] - xs[i] * ys[i] * ys[i]) / g;
      const T ny = ys[i] + (target - ys[i]) * omega;
      change = std::max(change, magnitude(ny - ys[i]));
      ys[i] = ny;
      scale = std::max(scale, magnitude(ny));
    }
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double xv = value_of(xs[i]);
      const double yv = value_of(ys[i]);
      residual = std::max(residual, std::abs(value_of(xs[i + 1]) - (a * xv + xv * xv * yv)));
      residual = std::max(residual, std::abs(value_of(ys[i + 1]) - (g * yv + xv * yv * yv)));
    }
    if (!std::isfinite(residual) || !std::isfinite(change)) break;
    if (residual > last_residual && omega > 0.1) omega *= 0.5;
    last_residual = residual;
    if (residual <= kCrossResidual && change <= 1e-15 * (1.0 + scale)) {
      out.xk = {xs[n], T(0.0)};
      out.y0 = ys[0];
      out.iterations = it;
      out.residual = residual;
      return out;
    }
  }
  throw NumericalError("cross_form_solve: fixed-point iteration did not converge for k = " +
                       std::to_string(k));
}

template <typename T>
struct Composed {
  std::array<T, 2> x{};
  T y{};
  T ymid{};
};

// Cross-coordinate form of T_km: (x0 in Pi_{g2}+, yc in Pi_{g1}-) -> same sections.
template <typename T>
Composed<T> compose_cross(const ReturnMapConfig& cfg, const Legs& legs, const std::array<T, 2>& x0,
                          const T& yc, double mu_g1, double mu_g2) {
  const LocalNormalForm& L = cfg.local;
  const std::size_t dim = L.x_dim();
  const CrossSolutionT<T> cs = cross_impl(L, x0, yc, legs.n1);
  std::array<T, 2> x = cs.xk;
  check_point(x, cs.y0, dim, 1);
  T y{};
  apply_global(*legs.G1, mu_g1, dim, x, yc, x, y);
  check_point(x, y, dim, 2);
  local_power(L, x, y, legs.n2, 3);
  Composed<T> out;
  out.ymid = y;
  apply_global(*legs.G2, mu_g2, dim, x, y, x, y);
  check_point(x, y, dim, 4);
  out.x = x;
  local_power(L, x, y, legs.n1, 5);
  out.y = y;
  return out;
}

double beta_of(const RescaleFrame& f, int g) { return g == 1 ? f.beta1 : f.beta2; }

template <typename T>
void to_original(const ReturnMapConfig& cfg, const RescaleFrame& f, const Legs& legs,
                 const std::array<T, 2>& X, const T& Y, std::array<T, 2>& x0, T& yc) {
  const GlobalMapTaylor& G = *legs.G2;
  const double bx = beta_of(f, legs.g2);
  if (cfg.local.kind() == LocalKind::Saddle) {
    x0[0] = G.x_plus[0] + f.shift1[0] + X[0] * (G.b[0] * bx);
    x0[1] = T(0.0);
  } else {
    const auto p = static_cast<std::size_t>(f.pivot);
    const std::size_t q = 1 - p;
    const T xp = X[0] * (G.b[p] * bx);
    x0[p] = G.x_plus[p] + f.shift1[p] + xp;
    x0[q] = G.x_plus[q] + f.shift1[q] + xp * (G.b[q] / G.b[p]) + X[1] * (f.delta_km * bx);
  }
  yc = legs.G1->y_minus + f.shift1[2] + Y * beta_of(f, legs.g1);
}

template <typename T>
RescaledStateT<T> from_original(const ReturnMapConfig& cfg, const RescaleFrame& f,
                                const Legs& legs, const std::array<T, 2>& x, const T& yc,
                                const T& ymid) {
  const GlobalMapTaylor& G = *legs.G2;
  const double bx = beta_of(f, legs.g2);
  RescaledStateT<T> r;
  if (cfg.local.kind() == LocalKind::Saddle) {
    r.X[0] = (x[0] - G.x_plus[0] - f.shift1[0]) / (G.b[0] * bx);
    r.X[1] = T(0.0);
  } else {
    const auto p = static_cast<std::size_t>(f.pivot);
    const std::size_t q = 1 - p;
    const T vp = x[p] - G.x_plus[p] - f.shift1[p];
    const T vq = x[q] - G.x_plus[q] - f.shift1[q];
    r.X[0] = vp / (G.b[p] * bx);
    r.X[1] = (vq - vp * (G.b[q] / G.b[p])) / (f.delta_km * bx);
  }
  r.Y = (yc - legs.G1->y_minus - f.shift1[2]) / beta_of(f, legs.g1);
  r.Ymid = (ymid - G.y_minus - f.shift2[2]) / bx;
  return r;
}

// c^T A^n v for the linear part.
double c_an_v(const LocalNormalForm& L, const std::array<double, 2>& c,
              const std::array<double, 2>& v, int n) {
  const std::array<double, 2> w = linear_power(L, v, n);
  double s = c[0] * w[0];
  if (L.x_dim() == 2) s += c[1] * w[1];
  return s;
}

}  // namespace

LocalNormalForm::LocalNormalForm(LocalKind kind, double lambda, double phi, double gamma,
                                 int sign_lambda, Nonlinearity nonlinearity)
    : kind_(kind),
      lambda_(lambda),
      phi_(phi),
      gamma_(gamma),
      sign_lambda_(sign_lambda),
      nonlinearity_(nonlinearity) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("lambda must lie in (0, 1)");
  if (!(std::abs(gamma) > 1.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("|gamma| must exceed 1");
  }
  if (!(lambda * std::abs(gamma) < 1.0)) {
    throw InvalidArgument("strong dissipativity lambda*|gamma| < 1 violated");
  }
  if (sign_lambda != 1 && sign_lambda != -1) throw InvalidArgument("sign_lambda must be +-1");
  if (kind == LocalKind::SaddleFocus) {
    if (!(phi > 0.0 && phi < std::numbers::pi)) throw InvalidArgument("phi must lie in (0, pi)");
    if (nonlinearity != Nonlinearity::Linear) {
      throw InvalidArgument("the cubic test terms are defined for the saddle form only");
    }
  }
  if (nonlinearity == Nonlinearity::TestCubic && !test_cubic_identities_hold()) {
    throw InvalidArgument("cubic test terms violate the normal-form identities");
  }
}

LocalNormalForm LocalNormalForm::saddle(double lambda, double gamma, int sign_lambda,
                                        Nonlinearity nonlinearity) {
  return LocalNormalForm(LocalKind::Saddle, lambda, 0.0, gamma, sign_lambda, nonlinearity);
}

LocalNormalForm LocalNormalForm::saddle_focus(double lambda, double phi, double gamma) {
  return LocalNormalForm(LocalKind::SaddleFocus, lambda, phi, gamma, 1, Nonlinearity::Linear);
}

bool test_cubic_identities_hold(unsigned seed) {
  using D = Taylor<1>;
  auto g = [](const D& x, const D& y) { return x * x * y; };
  auto h = [](const D& x, const D& y) { return x * y * y; };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 64; ++i) {
    const double s = u(rng);
    if (g(D(s), D(0.0)).value() != 0.0 || g(D(0.0), D(s)).value() != 0.0) return false;
    if (g(D::variable(0.0), D(s)).derivative(1) != 0.0) return false;
    if (h(D(s), D(0.0)).value() != 0.0 || h(D(0.0), D(s)).value() != 0.0) return false;
    if (h(D(s), D::variable(0.0)).derivative(1) != 0.0) return false;
  }
  return true;
}

void GlobalMapTaylor::validate(std::size_t dim) const {
  if (d == 0.0 || !std::isfinite(d)) throw InvalidArgument("global map needs d != 0");
  double nb = 0.0, nc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    nb += b[i] * b[i];
    nc += c[i] * c[i];
  }
  if (nb == 0.0) throw InvalidArgument("global map needs |b| != 0");
  if (nc == 0.0) throw InvalidArgument("global map needs |c| != 0");
  if (!std::isfinite(mu) || !std::isfinite(y_minus)) {
    throw InvalidArgument("global map values must be finite");
  }
}

Ordering ordering_for(int k, int m) { return k >= m ? Ordering::KGeqM : Ordering::KLtM; }

void ReturnMapConfig::validate() const {
  if (k < 1 || m < 1) throw InvalidArgument("k and m must be positive");
  if (ordering != ordering_for(k, m)) {
    throw InvalidArgument("ordering does not match k = " + std::to_string(k) +
                          ", m = " + std::to_string(m));
  }
  T1.validate(local.x_dim());
  T2.validate(local.x_dim());
}

ReturnMapConfig ReturnMapConfig::benchmark(int k, int m) {
  ReturnMapConfig cfg;
  cfg.local = LocalNormalForm::saddle(0.4, 2.0);
  cfg.k = k;
  cfg.m = m;
  cfg.ordering = ordering_for(k, m);
  return cfg;
}

ReturnMapConfig ReturnMapConfig::benchmark_focus(int k, int m, double phi) {
  ReturnMapConfig cfg = benchmark(k, m);
  cfg.local = LocalNormalForm::saddle_focus(0.4, phi, 2.0);
  return cfg;
}

double theta_of(const LocalNormalForm& local) {
  return -std::log(local.lambda()) / std::log(std::abs(local.gamma()));
}

double s_km(const LocalNormalForm& local, int k, int m) {
  return ipow(local.lambda(), m) * ipow(std::abs(local.gamma()), k);
}

bool in_theorem1_window(int k, int m, double theta, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (k < 1 || m < 1) return false;
  const double r = static_cast<double>(m) / static_cast<double>(k);
  const double upper = theta - delta;
  if (!(upper > 0.0)) return false;
  return 1.0 / upper < r && r < upper;
}

Point local_iterate(const LocalNormalForm& local, const Point& p, int n) {
  if (n < 0) throw InvalidArgument("local_iterate: n must be >= 0");
  Point r = p;
  if (n == 0) return r;
  local_power(local, r.x, r.y, n, 1);
  return r;
}

CrossSolution cross_form_solve(const LocalNormalForm& local, const std::array<double, 2>& x0,
                               double yk, int k) {
  return cross_impl<double>(local, x0, yk, k);
}

Point first_return(const ReturnMapConfig& cfg, const Point& p) {
  cfg.validate();
  const Legs legs = legs_of(cfg);
  const std::size_t dim = cfg.local.x_dim();
  Point q = p;
  local_power(cfg.local, q.x, q.y, legs.n1, 1);
  apply_global(*legs.G1, legs.G1->mu, dim, q.x, q.y, q.x, q.y);
  check_point(q.x, q.y, dim, 2);
  local_power(cfg.local, q.x, q.y, legs.n2, 3);
  apply_global(*legs.G2, legs.G2->mu, dim, q.x, q.y, q.x, q.y);
  check_point(q.x, q.y, dim, 4);
  return q;
}

std::array<double, 2> RescaleFrame::mu_from_M(double M1v, double M2v) const {
  return {M1v / scale[0] - param_shift[0], M2v / scale[1] - param_shift[1]};
}

std::array<double, 2> RescaleFrame::M_from_mu(double mu1, double mu2) const {
  return {scale[0] * (mu1 + param_shift[0]), scale[1] * (mu2 + param_shift[1])};
}

template <typename T>
RescaledStateT<T> rescaled_step(const ReturnMapConfig& cfg, const RescaleFrame& frame,
                                const std::array<T, 2>& X, const T& Y, double M1, double M2) {
  const Legs legs = legs_of(cfg);
  const std::array<double, 2> mu = frame.mu_from_M(M1, M2);
  std::array<T, 2> x0{};
  T yc{};
  to_original(cfg, frame, legs, X, Y, x0, yc);
  const Composed<T> c = compose_cross(cfg, legs, x0, yc, mu[static_cast<std::size_t>(legs.g1 - 1)],
                                      mu[static_cast<std::size_t>(legs.g2 - 1)]);
  return from_original(cfg, frame, legs, c.x, c.y, c.ymid);
}

template RescaledStateT<double> rescaled_step(const ReturnMapConfig&, const RescaleFrame&,
                                              const std::array<double, 2>&, const double&, double,
                                              double);
template RescaledStateT<Taylor<1>> rescaled_step(const ReturnMapConfig&, const RescaleFrame&,
                                                 const std::array<Taylor<1>, 2>&,
                                                 const Taylor<1>&, double, double);
template RescaledStateT<Taylor<4>> rescaled_step(const ReturnMapConfig&, const RescaleFrame&,
                                                 const std::array<Taylor<4>, 2>&,
                                                 const Taylor<4>&, double, double);

RescaleFrame rescale_frame(const ReturnMapConfig& cfg) {
  cfg.validate();
  const LocalNormalForm& L = cfg.local;
  const Legs legs = legs_of(cfg);
  const double g = L.gamma();
  const double d1 = cfg.T1.d;
  const double d2 = cfg.T2.d;

  RescaleFrame f;
  f.beta1 = -1.0 / std::cbrt(d2 * d1 * d1 * ipow(g, cfg.k + 2 * cfg.m));
  f.beta2 = -1.0 / std::cbrt(d1 * d2 * d2 * ipow(g, cfg.m + 2 * cfg.k));
  f.delta_km = std::pow(std::abs(g), -(2.0 * cfg.k + cfg.m) / 9.0);

  const auto i1 = static_cast<std::size_t>(legs.g1 - 1);
  const auto i2 = static_cast<std::size_t>(legs.g2 - 1);
  f.scale[i1] = ipow(g, legs.n2) / beta_of(f, legs.g2);
  f.scale[i2] = ipow(g, legs.n1) / beta_of(f, legs.g1);

  const std::array<double, 2>& b = legs.G1->b;
  const std::array<double, 2>& c = legs.G2->c;
  if (L.kind() == LocalKind::Saddle) {
    f.C = ipow(L.sign_lambda(), legs.n2) * b[0] * c[0];
    f.nu = 0.0;
  } else {
    const double amp = std::sqrt((b[0] * b[0] + b[1] * b[1]) * (c[0] * c[0] + c[1] * c[1]));
    f.nu = std::atan2(b[0] * c[1] - b[1] * c[0], b[0] * c[0] + b[1] * c[1]);
    f.C = amp * std::cos(legs.n2 * L.phi() - f.nu);
    const std::array<double, 2>& bx = legs.G2->b;
    f.pivot = std::abs(bx[0]) >= std::abs(bx[1]) ? 0 : 1;
  }
  f.M3_coeff = f.C * ipow(L.lambda(), legs.n2) * ipow(g, legs.n1);

  // Leading-order parameter shifts, then numerical refinement of every constant
  // the truncated composition produces.
  f.param_shift[i1] = -ipow(g, -legs.n2) * legs.G2->y_minus;
  f.param_shift[i2] = -ipow(g, -legs.n1) * legs.G1->y_minus +
                      c_an_v(L, c, legs.G1->x_plus, legs.n2);

  const bool cubic = L.nonlinearity() == Nonlinearity::TestCubic;
  const int passes = cubic ? 10 : 4;
  const std::array<double, 2> X0{0.0, 0.0};
  auto step = [&](double Y, double Ma, double Mb) {
    // (Ma, Mb) in leg order.
    std::array<double, 2> M{};
    M[i1] = Ma;
    M[i2] = Mb;
    return rescaled_step<double>(cfg, f, X0, Y, M[0], M[1]);
  };
  const double bx = beta_of(f, legs.g2);
  const double by = beta_of(f, legs.g1);
  for (int pass = 0; pass < passes; ++pass) {
    RescaledState s = step(0.0, 0.0, 0.0);
    f.param_shift[i1] += s.Ymid / f.scale[i1];
    s = step(0.0, 0.0, 0.0);
    f.param_shift[i2] += (s.Y + s.Ymid * s.Ymid) / f.scale[i2];
    s = step(0.0, 0.0, 0.0);
    // Constant term of the x equation.
    const std::array<double, 2>& bs = legs.G2->b;
    if (L.kind() == LocalKind::Saddle) {
      f.shift1[0] += bs[0] * bx * (s.X[0] - s.Ymid);
    } else {
      const auto p = static_cast<std::size_t>(f.pivot);
      const std::size_t q = 1 - p;
      const double dp = bs[p] * bx * (s.X[0] - s.Ymid);
      f.shift1[p] += dp;
      f.shift1[q] += dp * (bs[q] / bs[p]) + f.delta_km * bx * s.X[1];
    }
    if (cubic) {
      // Linear terms in Y (first leg) and in the intermediate coordinate (second leg).
      const double h = 1e-4;
      const double lin1 = (step(h, 0.0, 0.0).Ymid - step(-h, 0.0, 0.0).Ymid) / (2.0 * h);
      f.shift1[2] += by * lin1 / 2.0;
      const RescaledState sp = step(0.0, h, 0.0);
      const RescaledState sm = step(0.0, -h, 0.0);
      const double lin2 = (sp.Y - sm.Y) / (sp.Ymid - sm.Ymid);
      f.shift2[2] += bx * lin2 / 2.0;
    }
  }
  const std::array<double, 2> M = f.M_from_mu(cfg.T1.mu, cfg.T2.mu);
  f.M1 = M[0];
  f.M2 = M[1];
  return f;
}

RescaledState rescaled_return(const ReturnMapConfig& cfg, const RescaleFrame& frame,
                              const std::array<double, 2>& X, double Y, double M1, double M2) {
  return rescaled_step<double>(cfg, frame, X, Y, M1, M2);
}

RescaledState rescaled_return(const ReturnMapConfig& cfg, const std::array<double, 2>& X,
                              double Y, double M1, double M2) {
  return rescaled_step<double>(cfg, rescale_frame(cfg), X, Y, M1, M2);
}

Point frame_to_original(const ReturnMapConfig& cfg, const RescaleFrame& frame,
                        const std::array<double, 2>& X, double Y) {
  Point p;
  to_original(cfg, frame, legs_of(cfg), X, Y, p.x, p.y);
  return p;
}

RescaledState frame_from_original(const ReturnMapConfig& cfg, const RescaleFrame& frame,
                                  const Point& p) {
  const Legs legs = legs_of(cfg);
  return from_original(cfg, frame, legs, p.x, p.y, legs.G2->y_minus + frame.shift2[2]);
}

double limit_value(const ReturnMapConfig& cfg, const RescaleFrame& frame, double Y, double M1,
                   double M2, bool with_m3) {
  const bool kgeqm = cfg.ordering == Ordering::KGeqM;
  const double Ma = kgeqm ? M1 : M2;
  const double Mb = kgeqm ? M2 : M1;
  const double t = Ma - Y * Y;
  double v = Mb - t * t;
  if (with_m3) v += frame.M3_coeff * Y;
  return v;
}

LimitMapError limit_map_error(const ReturnMapConfig& cfg, double radius, int grid) {
  if (!(radius > 0.0)) throw InvalidArgument("limit_map_error: radius must be positive");
  if (grid < 2) throw InvalidArgument("limit_map_error: grid must be >= 2");
  const RescaleFrame frame = rescale_frame(cfg);
  LimitMapError out;
  const std::array<double, 2> X0{0.0, 0.0};
  auto node = [&](int i) { return -radius + 2.0 * radius * i / (grid - 1); };
  for (int a = 0; a < grid; ++a) {
    const double Y = node(a);
    for (int b = 0; b < grid; ++b) {
      const double M1 = node(b);
      for (int c = 0; c < grid; ++c) {
        const double M2 = node(c);
        if (Y * Y + M1 * M1 + M2 * M2 > radius * radius * (1.0 + 1e-12)) continue;
        double Ybar = 0.0;
        try {
          Ybar = rescaled_step<double>(cfg, frame, X0, Y, M1, M2).Y;
        } catch (const NumericalError&) {
          ++out.excluded;
          continue;
        }
        if (!std::isfinite(Ybar)) {
          ++out.excluded;
          continue;
        }
        ++out.evaluated;
        out.err_thm1 =
            std::max(out.err_thm1, std::abs(Ybar - limit_value(cfg, frame, Y, M1, M2, false)));
        out.err_thm2 =
            std::max(out.err_thm2, std::abs(Ybar - limit_value(cfg, frame, Y, M1, M2, true)));
      }
    }
  }
  return out;
}

double measured_linear_coefficient(const ReturnMapConfig& cfg, double h) {
  const RescaleFrame frame = rescale_frame(cfg);
  const std::array<double, 2> X0{0.0, 0.0};
  const double up = rescaled_step<double>(cfg, frame, X0, h, 0.0, 0.0).Y;
  const double dn = rescaled_step<double>(cfg, frame, X0, -h, 0.0, 0.0).Y;
  return (up - dn) / (2.0 * h);
}

double s_at_theta(double gamma, int k, int m, double theta) {
  return std::pow(std::abs(gamma), static_cast<double>(k) - m * theta);
}

SequencePlan plan_sequence_saddle(double theta0, double gamma, const std::vector<double>& s,
                                  const std::vector<int>& m) {
  if (!(theta0 > 1.0)) throw InvalidArgument("plan_sequence_saddle: theta0 must exceed 1");
  if (!(std::abs(gamma) > 1.0)) throw InvalidArgument("plan_sequence_saddle: |gamma| must exceed 1");
  if (s.size() != m.size()) throw InvalidArgument("plan_sequence_saddle: s and m lengths differ");
  SequencePlan plan;
  const double lg = std::log(std::abs(gamma));
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    const int j = static_cast<int>(idx) + 1;
    const int mj = m[idx];
    if (mj < 1 || !(s[idx] > 0.0)) {
      plan.diagnostics.push_back("j=" + std::to_string(j) + ": needs m >= 1 and s > 0");
      continue;
    }
    const auto kj = static_cast<int>(std::lround(theta0 * mj));
    if (kj < mj) {
      plan.diagnostics.push_back("j=" + std::to_string(j) + ": no k >= m with k/m near theta0");
      continue;
    }
    SequenceEntry e;
    e.j = j;
    e.k = kj;
    e.m = mj;
    e.s = s[idx];
    const double ratio = static_cast<double>(kj) / mj;
    const double w = std::log(s[idx]) / (mj * lg);
    e.end1 = ratio - w;
    e.end2 = ratio + w;
    e.lo = std::min(e.end1, theta0);
    e.hi = std::max(e.end2, theta0);
    plan.entries.push_back(e);
  }
  return plan;
}

SequencePlan plan_sequence_saddle_focus(double phi0, double lambda, double gamma,
                                        const std::vector<double>& s, const std::vector<int>& m,
                                        double C, double nu, const std::vector<int>& k) {
  if (!(phi0 > 0.0 && phi0 < std::numbers::pi)) {
    throw InvalidArgument("plan_sequence_saddle_focus: phi0 must lie in (0, pi)");
  }
  if (!(lambda > 0.0 && lambda < 1.0) || !(std::abs(gamma) > 1.0) || !(C > 0.0)) {
    throw InvalidArgument("plan_sequence_saddle_focus: need 0 < lambda < 1, |gamma| > 1, C > 0");
  }
  if (s.size() != m.size() || (!k.empty() && k.size() != m.size())) {
    throw InvalidArgument("plan_sequence_saddle_focus: list lengths differ");
  }
  SequencePlan plan;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    const int j = static_cast<int>(idx) + 1;
    const int mj = m[idx];
    const double sj = s[idx];
    if (mj < 1 || !(sj > 0.0)) {
      plan.diagnostics.push_back("j=" + std::to_string(j) + ": needs m >= 1 and s > 0");
      continue;
    }
    auto arg = [&](int kk) { return sj / (C * ipow(lambda, mj) * ipow(std::abs(gamma), kk)); };
    int kj = mj;
    if (!k.empty()) {
      kj = k[idx];
      if (kj < mj) {
        plan.diagnostics.push_back("j=" + std::to_string(j) + ": k must be >= m");
        continue;
      }
    } else {
      const double target = std::min(1.0, 1.0 / sj);
      while (arg(kj) > target && kj < 4 * mj + 64) ++kj;
    }
    const double a = arg(kj);
    if (!(a <= 1.0)) {
      plan.diagnostics.push_back("j=" + std::to_string(j) + ": arccos argument " +
                                 std::to_string(a) + " exceeds 1 at k=" + std::to_string(kj));
      continue;
    }
    SequenceEntry e;
    e.j = j;
    e.k = kj;
    e.m = mj;
    e.s = sj;
    e.n = static_cast<int>(std::lround(mj * phi0 / two_pi));
    e.arccos_arg = a;
    const double ac = std::acos(a);
    e.end1 = (ac + nu + two_pi * e.n) / mj;
    e.end2 = (std::numbers::pi - ac + nu + two_pi * e.n) / mj;
    e.lo = std::min(e.end1, phi0);
    e.hi = std::max(e.end2, phi0);
    plan.entries.push_back(e);
  }
  return plan;
}

std::array<double, 2> predict_shrimp_location(const ReturnMapConfig& cfg,
                                              const std::array<double, 2>& M_event) {
  return rescale_frame(cfg).mu_from_M(M_event[0], M_event[1]);
}

std::array<double, 2> predict_shrimp_location_leading(const ReturnMapConfig& cfg,
                                                      const std::array<double, 2>& M_event) {
  cfg.validate();
  const Legs legs = legs_of(cfg);
  const double g = cfg.local.gamma();
  const double d1 = cfg.T1.d;
  const double d2 = cfg.T2.d;
  const double beta1 = -1.0 / std::cbrt(d2 * d1 * d1 * ipow(g, cfg.k + 2 * cfg.m));
  const double beta2 = -1.0 / std::cbrt(d1 * d2 * d2 * ipow(g, cfg.m + 2 * cfg.k));
  auto beta = [&](int gi) { return gi == 1 ? beta1 : beta2; };
  const auto i1 = static_cast<std::size_t>(legs.g1 - 1);
  const auto i2 = static_cast<std::size_t>(legs.g2 - 1);
  std::array<double, 2> mu{};
  mu[i1] = M_event[i1] * beta(legs.g2) * ipow(g, -legs.n2) + ipow(g, -legs.n2) * legs.G2->y_minus;
  mu[i2] = M_event[i2] * beta(legs.g1) * ipow(g, -legs.n1) + ipow(g, -legs.n1) * legs.G1->y_minus -
           c_an_v(cfg.local, legs.G2->c, legs.G1->x_plus, legs.n2);
  return mu;
}

}  // namespace shrimplab
