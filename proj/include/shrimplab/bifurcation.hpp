#pragma once

// Periodic orbits, fold (SN) and flip (PD) curves of one-dimensional maps
// Y -> T(Y; p), and the codimension-two points on them.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shrimplab/homoclinic.hpp"
#include "shrimplab/maps.hpp"
#include "shrimplab/taylor.hpp"

namespace shrimplab {

/// A parametrised scalar map with exact Taylor jets in the state.
class JetMap {
 public:
  virtual ~JetMap() = default;
  virtual std::size_t param_count() const = 0;
  /// Order-4 expansion of one application of the map at y.
  virtual Taylor<4> eval(double y, const std::vector<double>& params) const = 0;
  virtual std::string describe() const = 0;
};

/// Polynomial family, optionally padded with parameters the map ignores.
class ModelJetMap final : public JetMap {
 public:
  explicit ModelJetMap(Family family, std::size_t dummy_params = 0);
  std::size_t param_count() const override { return family_arity(family_) + dummies_; }
  Taylor<4> eval(double y, const std::vector<double>& params) const override;
  std::string describe() const override;
  Family family() const { return family_; }

 private:
  Family family_;
  std::size_t dummies_;
};

/// Y-dynamics of the rescaled return map with X slaved: X*(Y) solves X = Xbar(X, Y),
/// then g(Y) = Ybar(X*(Y), Y). Fixed points and folds coincide with those of the
/// full map. Parameters are (M1, M2).
class ReducedReturnMap final : public JetMap {
 public:
  explicit ReducedReturnMap(ReturnMapConfig cfg);
  std::size_t param_count() const override { return 2; }
  Taylor<4> eval(double y, const std::vector<double>& params) const override;
  std::string describe() const override;
  const ReturnMapConfig& config() const { return cfg_; }
  const RescaleFrame& frame() const { return frame_; }

 private:
  ReturnMapConfig cfg_;
  RescaleFrame frame_;
};

/// n-fold composition jet g = T^n at y.
Taylor<4> iterate_jet(const JetMap& map, const std::vector<double>& params, double y, int n);

struct PeriodicOrbit {
  int period = 1;
  double Y = 0.0;
  double multiplier = 0.0;
  std::vector<double> params;
};

enum class BifKind { SN, PD, Cusp, DegenerateFlip };
std::string_view bif_kind_name(BifKind k);

struct BifPoint {
  BifKind kind = BifKind::SN;
  PeriodicOrbit orbit;
  /// "residual", "multiplier_residual", "g2" (second derivative of T^n), "l1".
  std::map<std::string, double> test_values;
};

struct CurvePoint {
  std::vector<double> params;
  double Y = 0.0;
  double multiplier = 0.0;
  double g2 = 0.0;
  double l1 = 0.0;
};

enum class StopReason { MaxPoints, Boundary, StepUnderflow };

struct BifCurve {
  BifKind kind = BifKind::SN;
  int period = 1;
  std::size_t param_i = 0;
  std::size_t param_j = 1;
  std::vector<CurvePoint> points;
  std::vector<BifPoint> codim2_hits;
  StopReason stop = StopReason::MaxPoints;
};

inline constexpr double kNewtonTol = 1e-12;
inline constexpr int kNewtonMaxIter = 50;

/// Newton on T^n(Y) - Y. Rejects orbits whose minimal period is a proper divisor of n.
PeriodicOrbit find_periodic_orbit(const JetMap& map, const std::vector<double>& params,
                                  int period, double y_guess);

/// Newton on {T^n(Y) - Y = 0, (T^n)'(Y) -+ 1 = 0} in (Y, params[free_param]).
BifPoint solve_codim1(const JetMap& map, const std::vector<double>& params, int period,
                      BifKind kind, std::size_t free_param, double y_guess, double p_guess);

struct ContinuationOptions {
  double step = 0.02;
  double min_step = 1e-6;
  double max_step = 0.1;
  int max_points = 2000;
  /// +1 or -1: initial direction along the tangent.
  int direction = 1;
  /// Box on (param_i, param_j); continuation stops when it leaves.
  std::array<double, 4> bounds{-1e3, 1e3, -1e3, 1e3};
  double y_bound = 1e3;
};

/// Pseudo-arclength continuation in (Y, p_i, p_j). Codim-2 hits are located and stored.
BifCurve continue_codim1(const JetMap& map, const BifPoint& start, std::size_t param_i,
                         std::size_t param_j, const ContinuationOptions& opts);

/// (1/4) g''^2 + (1/6) g''' at a flip of g = T^n. Positive means a stable 2-cycle is born.
double lyapunov_value_1(const JetMap& map, const BifPoint& pd_point);

/// Sign changes of g'' along SN curves and of l1 along PD curves, refined by bisection.
std::vector<BifPoint> detect_codim2(const JetMap& map, const BifCurve& curve);

/// Header "kind,period,param_i,param_j,Y,multiplier,g2,l1" then one row per point.
void write_curve_csv(std::ostream& out, const BifCurve& curve);

}  // namespace shrimplab
