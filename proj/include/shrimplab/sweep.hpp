#pragma once

// Parameter-plane rasterisation of attractor type.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shrimplab/homoclinic.hpp"
#include "shrimplab/maps.hpp"

namespace shrimplab {

enum class SeedRule { CriticalPoint, FixedSeed };

struct SweepSpec {
  Family family = Family::DoubleParabola;
  /// Parameters not on the plane; size must equal the family arity.
  std::vector<double> base_params{0.0, 0.0};
  std::size_t axis_i = 0;
  std::size_t axis_j = 1;
  double i_min = -1.0;
  double i_max = 1.0;
  double j_min = -1.0;
  double j_max = 1.0;
  int nx = 64;
  int ny = 64;
  int transient = 1024;
  int max_period = 16;
  int samples = 4096;
  double escape_radius = kDefaultEscapeRadius;
  SeedRule seed_rule = SeedRule::CriticalPoint;
  double seed = 0.0;
  /// When set the plane is (mu1, mu2) of this return map and `family` is ignored.
  std::optional<ReturnMapConfig> return_map;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  /// Checks only what a single-point scan needs (no plane axes or ranges).
  void validate_scan() const;
  double param_i(int i) const;
  double param_j(int j) const;
  /// Number of trailing states kept for period detection.
  int tail() const { return 2 * max_period + 1; }
};

enum class Outcome { Period, Chaotic, Escaped, Unresolved };

struct CellOutcome {
  Outcome kind = Outcome::Unresolved;
  int period = 0;
  /// Lyapunov exponent per iteration; 0 for escaped cells.
  double lyap = 0.0;

  bool operator==(const CellOutcome&) const = default;
};

std::string_view outcome_name(Outcome o);

struct SweepGrid {
  SweepSpec spec;
  /// Row-major, cells[j * nx + i].
  std::vector<CellOutcome> cells;

  const CellOutcome& at(int i, int j) const {
    return cells[static_cast<std::size_t>(j) * static_cast<std::size_t>(spec.nx) +
                 static_cast<std::size_t>(i)];
  }
};

inline constexpr double kRecurrenceTol = 1e-6;

/// Classifies the attractor reached from the seed at the given full parameter vector
/// (family parameters, or (mu1, mu2) for a return map).
CellOutcome attractor_scan(const SweepSpec& spec, const std::vector<double>& params);

/// Number of workers from SHRIMPLAB_WORKERS, else hardware concurrency.
unsigned default_workers();

/// Output is independent of `workers`.
SweepGrid plane_sweep(const SweepSpec& spec, unsigned workers = 1);

struct Component {
  int period = 0;
  std::size_t count = 0;
  int i_min = 0;
  int i_max = 0;
  int j_min = 0;
  int j_max = 0;
};

/// 4-neighbour connected components of Period(period) cells, in scan order of their first cell.
std::vector<Component> shrimp_locate(const SweepGrid& grid, int period);

/// Chaotic 0, Unresolved 16, Period(p) 48 + round(160 (p - 1) / max(1, max_period - 1)), Escaped 255.
int gray_level(const CellOutcome& c, int max_period);

/// CSV columns i,j,param_i,param_j,outcome,period_or_lyap.
void write_grid_csv(std::ostream& out, const SweepGrid& grid, const std::string& header = {});
/// Plain PGM, top row = largest param_j.
void write_grid_pgm(std::ostream& out, const SweepGrid& grid, const std::string& header = {});
/// Writes <stem>.csv and <stem>.pgm. `header` lines are emitted with a "# " prefix.
void export_grid(const SweepGrid& grid, const std::filesystem::path& stem,
                 const std::string& header = {});
/// Rebuilds the cells of a grid with the given spec from its CSV.
SweepGrid import_grid_csv(std::istream& in, const SweepSpec& spec);
SweepGrid import_grid_csv(const std::filesystem::path& path, const SweepSpec& spec);

}  // namespace shrimplab
