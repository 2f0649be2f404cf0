#pragma once

// First-return maps near a pair of quadratic homoclinic tangencies.
//
// The local map T0 near the saddle is a linear normal form (optionally with the
// cubic test terms g = x^2 y, h = x y^2); the global maps T1, T2 are exact
// quadratic Taylor truncations. T_km = T2 T0^m T1 T0^k (k >= m) or
// T1 T0^k T2 T0^m (k < m). A RescaleFrame brings T_km close to
//
//     Xbar = M_a - Y^2,   Ybar = M_b - Xbar^2 + C Y,
//
// where (M_a, M_b) = (M1, M2) for k >= m and (M2, M1) for k < m.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "shrimplab/taylor.hpp"

namespace shrimplab {

enum class LocalKind { Saddle, SaddleFocus };
enum class Nonlinearity { Linear, TestCubic };
enum class Ordering { KGeqM, KLtM };

class LocalNormalForm {
 public:
  /// lambda * |gamma| < 1 is required (strong dissipativity).
  static LocalNormalForm saddle(double lambda, double gamma, int sign_lambda = 1,
                                Nonlinearity nonlinearity = Nonlinearity::Linear);
  static LocalNormalForm saddle_focus(double lambda, double phi, double gamma);

  /// Benchmark saddle, lambda = 0.4, gamma = 2.
  LocalNormalForm() : LocalNormalForm(saddle(0.4, 2.0)) {}

  LocalKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double phi() const { return phi_; }
  double gamma() const { return gamma_; }
  int sign_lambda() const { return sign_lambda_; }
  Nonlinearity nonlinearity() const { return nonlinearity_; }
  /// Dimension of the stable coordinate x (1 or 2).
  std::size_t x_dim() const { return kind_ == LocalKind::Saddle ? 1 : 2; }

 private:
  LocalNormalForm(LocalKind kind, double lambda, double phi, double gamma, int sign_lambda,
                  Nonlinearity nonlinearity);

  LocalKind kind_;
  double lambda_;
  double phi_;
  double gamma_;
  int sign_lambda_;
  Nonlinearity nonlinearity_;
};

/// True when the cubic test terms satisfy g(x,0) = g(0,y) = g_x(0,y) = 0 and
/// h(x,0) = h(0,y) = h_y(x,0) = 0 on a random sample.
bool test_cubic_identities_hold(unsigned seed = 1);

template <typename T>
struct PointT {
  std::array<T, 2> x{};  ///< x[1] unused for a saddle
  T y{};
};
using Point = PointT<double>;

/// xbar = x_plus + a x + b (y - y_minus),  ybar = mu + c.x + d (y - y_minus)^2.
struct GlobalMapTaylor {
  std::array<double, 2> x_plus{1.0, 0.0};
  double y_minus = 1.0;
  std::array<std::array<double, 2>, 2> a{};
  std::array<double, 2> b{1.0, 0.0};
  std::array<double, 2> c{1.0, 0.0};
  double d = 1.0;
  double mu = 0.0;

  /// Throws InvalidArgument unless d != 0, |b| != 0, |c| != 0 on the first `dim` components.
  void validate(std::size_t dim) const;
};

struct ReturnMapConfig {
  LocalNormalForm local;
  GlobalMapTaylor T1;
  GlobalMapTaylor T2;
  int k = 6;
  int m = 6;
  Ordering ordering = Ordering::KGeqM;

  void validate() const;

  /// lambda = 0.4, gamma = 2, unit global coefficients, a = 0, x+ = y- = 1.
  static ReturnMapConfig benchmark(int k, int m);
  static ReturnMapConfig benchmark_focus(int k, int m, double phi);
};

Ordering ordering_for(int k, int m);

double theta_of(const LocalNormalForm& local);
double s_km(const LocalNormalForm& local, int k, int m);
/// (theta - delta)^-1 < m/k < theta - delta.
bool in_theorem1_window(int k, int m, double theta, double delta);

Point local_iterate(const LocalNormalForm& local, const Point& p, int n);

template <typename T>
struct CrossSolutionT {
  std::array<T, 2> xk{};
  T y0{};
  int iterations = 0;
  double residual = 0.0;
};
using CrossSolution = CrossSolutionT<double>;

/// Finds (xk, y0) with T0^k(x0, y0) = (xk, yk).
CrossSolution cross_form_solve(const LocalNormalForm& local, const std::array<double, 2>& x0,
                               double yk, int k);

/// Plain forward composition in original coordinates, starting in Pi_2+ (KGeqM)
/// or Pi_1+ (KLtM). Escape reported with stage 1..4.
Point first_return(const ReturnMapConfig& cfg, const Point& p);

struct RescaleFrame {
  double beta1 = 0.0;
  double beta2 = 0.0;
  /// Offsets of the start point from (x+, y-) of the start section: (x_1, x_2, y).
  std::array<double, 3> shift1{};
  /// Offset of the intermediate y from y- of the middle section (index 2).
  std::array<double, 3> shift2{};
  /// Rescaled parameters at the config's mu values.
  double M1 = 0.0;
  double M2 = 0.0;
  /// Coefficient of Y in the rescaled map.
  double M3_coeff = 0.0;
  /// C2 (k >= m) or C1 (k < m), i.e. M3_coeff without the lambda/gamma powers.
  double C = 0.0;
  double nu = 0.0;
  double delta_km = 1.0;
  /// M_i = scale_i * (mu_i + param_shift_i).
  std::array<double, 2> scale{};
  std::array<double, 2> param_shift{};
  /// Stable coordinate aligned with b (saddle focus): index of the larger |b| entry.
  int pivot = 0;

  std::array<double, 2> mu_from_M(double M1v, double M2v) const;
  std::array<double, 2> M_from_mu(double mu1, double mu2) const;
};

RescaleFrame rescale_frame(const ReturnMapConfig& cfg);

template <typename T>
struct RescaledStateT {
  std::array<T, 2> X{};
  T Y{};
  /// Intermediate coordinate after the first global map.
  T Ymid{};
};
using RescaledState = RescaledStateT<double>;

/// One application of T_km in rescaled coordinates with the global-map mu set from (M1, M2).
template <typename T>
RescaledStateT<T> rescaled_step(const ReturnMapConfig& cfg, const RescaleFrame& frame,
                                const std::array<T, 2>& X, const T& Y, double M1, double M2);

extern template RescaledStateT<double> rescaled_step(const ReturnMapConfig&, const RescaleFrame&,
                                                     const std::array<double, 2>&, const double&,
                                                     double, double);
extern template RescaledStateT<Taylor<1>> rescaled_step(const ReturnMapConfig&,
                                                        const RescaleFrame&,
                                                        const std::array<Taylor<1>, 2>&,
                                                        const Taylor<1>&, double, double);
extern template RescaledStateT<Taylor<4>> rescaled_step(const ReturnMapConfig&,
                                                        const RescaleFrame&,
                                                        const std::array<Taylor<4>, 2>&,
                                                        const Taylor<4>&, double, double);

RescaledState rescaled_return(const ReturnMapConfig& cfg, const RescaleFrame& frame,
                              const std::array<double, 2>& X, double Y, double M1, double M2);
RescaledState rescaled_return(const ReturnMapConfig& cfg, const std::array<double, 2>& X,
                              double Y, double M1, double M2);

/// Original cross coordinates (x0, yc) of a rescaled point, and back.
Point frame_to_original(const ReturnMapConfig& cfg, const RescaleFrame& frame,
                        const std::array<double, 2>& X, double Y);
RescaledState frame_from_original(const ReturnMapConfig& cfg, const RescaleFrame& frame,
                                  const Point& p);

/// Limit value M_b - (M_a - Y^2)^2 (+ M3_coeff Y when with_m3) in family order (M1, M2).
double limit_value(const ReturnMapConfig& cfg, const RescaleFrame& frame, double Y, double M1,
                   double M2, bool with_m3);

struct LimitMapError {
  double err_thm1 = 0.0;
  double err_thm2 = 0.0;
  int evaluated = 0;
  /// Lattice points dropped because the composition escaped.
  int excluded = 0;
};

/// Sup of |Ybar - limit| over a grid^3 lattice of (Y, M1, M2) inside the ball of
/// the given radius, at X = 0.
LimitMapError limit_map_error(const ReturnMapConfig& cfg, double radius, int grid);

/// Central difference dYbar/dY at X = 0, Y = 0, M = 0.
double measured_linear_coefficient(const ReturnMapConfig& cfg, double h = 1e-3);

struct SequenceEntry {
  int j = 0;
  int k = 0;
  int m = 0;
  int n = 0;  ///< saddle focus only
  double lo = 0.0;
  double hi = 0.0;
  double s = 0.0;
  /// Tuned modulus at the two endpoints (theta^1, theta^2 or phi^1, phi^2).
  double end1 = 0.0;
  double end2 = 0.0;
  /// Saddle focus: s / (C lambda^m gamma^k).
  double arccos_arg = 0.0;

  double diam() const { return hi - lo; }
};

struct SequencePlan {
  std::vector<SequenceEntry> entries;
  std::vector<std::string> diagnostics;
};

/// k_j = round(theta0 m_j); theta^{1,2} = k/m -+ ln s / (m ln|gamma|).
SequencePlan plan_sequence_saddle(double theta0, double gamma, const std::vector<double>& s,
                                  const std::vector<int>& m);

/// n_j = round(m_j phi0 / 2pi). If `k` is empty, k_j starts at m_j and grows until
/// s_j / (C lambda^m gamma^k) <= min(1, 1/s_j).
SequencePlan plan_sequence_saddle_focus(double phi0, double lambda, double gamma,
                                        const std::vector<double>& s, const std::vector<int>& m,
                                        double C = 1.0, double nu = 0.0,
                                        const std::vector<int>& k = {});

/// S at theta for the given (k, m): |gamma|^(k - m theta).
double s_at_theta(double gamma, int k, int m, double theta);

/// (mu1, mu2) where the rescaled parameters equal M_event (full frame inversion).
std::array<double, 2> predict_shrimp_location(const ReturnMapConfig& cfg,
                                              const std::array<double, 2>& M_event);
/// Same from the leading-order parameter formulas only.
std::array<double, 2> predict_shrimp_location_leading(const ReturnMapConfig& cfg,
                                                      const std::array<double, 2>& M_event);

}  // namespace shrimplab
