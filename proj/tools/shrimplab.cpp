// shrimplab: sweeps, continuation, codim-2 search, rescaling checks, sequence plans
// and shrimp-location predictions driven by a key-value config file.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "shrimplab/bifurcation.hpp"
#include "shrimplab/config.hpp"
#include "shrimplab/errors.hpp"
#include "shrimplab/homoclinic.hpp"
#include "shrimplab/maps.hpp"
#include "shrimplab/sweep.hpp"

namespace fs = std::filesystem;
using namespace shrimplab;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

struct RunConfig {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  int workers = 0;
  bool force = false;
};

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ConfigError bad_value(const Config& cfg, const std::string& key, const std::string& what) {
  return ConfigError("config key '" + key + "'" +
                         (cfg.line_of(key) > 0 ? " (line " + std::to_string(cfg.line_of(key)) + ")"
                                               : std::string()) +
                         ": " + what,
                     key, cfg.line_of(key));
}

const std::set<std::string> kKnownKeys = {
    "map.source", "map.family", "map.params",
    "return_map.local", "return_map.lambda", "return_map.gamma", "return_map.phi",
    "return_map.sign_lambda", "return_map.nonlinearity", "return_map.k", "return_map.m",
    "return_map.t1.x_plus", "return_map.t1.a", "return_map.t1.b", "return_map.t1.c", "return_map.t1.y_minus", "return_map.t1.d", "return_map.t1.mu", "return_map.t2.x_plus", "return_map.t2.a", "return_map.t2.b", "return_map.t2.c", "return_map.t2.y_minus", "return_map.t2.d", "return_map.t2.mu",
    "sweep.axis_i", "sweep.axis_j", "sweep.i_range", "sweep.j_range", "sweep.nx", "sweep.ny",
    "sweep.transient", "sweep.max_period", "sweep.samples", "sweep.escape_radius",
    "sweep.seed_rule", "sweep.seed",
    "continue.kind", "continue.period", "continue.free_param", "continue.y_guess",
    "continue.p_guess", "continue.param_i", "continue.param_j", "continue.step",
    "continue.min_step", "continue.max_step", "continue.max_points", "continue.bounds",
    "continue.y_bound", "continue.direction",
    "rescale.k", "rescale.m", "rescale.radius", "rescale.grid", "rescale.h",
    "plan.kind", "plan.count", "plan.s", "plan.m", "plan.theta0", "plan.gamma", "plan.phi0",
    "plan.lambda", "plan.c", "plan.nu", "plan.k",
    "predict.k", "predict.m1"};

GlobalMapTaylor global_from(const Config& cfg, const std::string& p) {
  GlobalMapTaylor g;
  const auto xp = cfg.get_doubles(p + ".x_plus", {g.x_plus[0], g.x_plus[1]});
  const auto a = cfg.get_doubles(p + ".a", {0.0, 0.0, 0.0, 0.0});
  const auto b = cfg.get_doubles(p + ".b", {g.b[0], g.b[1]});
  const auto c = cfg.get_doubles(p + ".c", {g.c[0], g.c[1]});
  if (xp.size() != 2) throw bad_value(cfg, p + ".x_plus", "expected 2 values");
  if (a.size() != 4) throw bad_value(cfg, p + ".a", "expected 4 values (a00,a01,a10,a11)");
  if (b.size() != 2) throw bad_value(cfg, p + ".b", "expected 2 values");
  if (c.size() != 2) throw bad_value(cfg, p + ".c", "expected 2 values");
  g.x_plus = {xp[0], xp[1]};
  g.a = {{{a[0], a[1]}, {a[2], a[3]}}};
  g.b = {b[0], b[1]};
  g.c = {c[0], c[1]};
  g.y_minus = cfg.get_double(p + ".y_minus", g.y_minus);
  g.d = cfg.get_double(p + ".d", g.d);
  g.mu = cfg.get_double(p + ".mu", g.mu);
  return g;
}

ReturnMapConfig return_map_from(const Config& cfg, std::optional<int> k = {},
                                std::optional<int> m = {}) {
  ReturnMapConfig r;
  const std::string local = cfg.get_string("return_map.local", "saddle");
  const double lambda = cfg.get_double("return_map.lambda", 0.4);
  const double gamma = cfg.get_double("return_map.gamma", 2.0);
  try {
    if (local == "saddle") {
      const std::string nl = cfg.get_string("return_map.nonlinearity", "linear");
      if (nl != "linear" && nl != "test_cubic") {
        throw bad_value(cfg, "return_map.nonlinearity", "expected linear or test_cubic");
      }
      r.local = LocalNormalForm::saddle(
          lambda, gamma, cfg.get_int("return_map.sign_lambda", 1),
          nl == "linear" ? Nonlinearity::Linear : Nonlinearity::TestCubic);
    } else if (local == "saddle_focus") {
      r.local = LocalNormalForm::saddle_focus(lambda, cfg.get_double("return_map.phi", 0.7), gamma);
    } else {
      throw bad_value(cfg, "return_map.local", "expected saddle or saddle_focus");
    }
  } catch (const InvalidArgument& e) {
    throw bad_value(cfg, "return_map.local", e.what());
  }
  r.T1 = global_from(cfg, "return_map.t1");
  r.T2 = global_from(cfg, "return_map.t2");
  r.k = k ? *k : cfg.get_int("return_map.k", 8);
  r.m = m ? *m : cfg.get_int("return_map.m", r.k);
  r.ordering = ordering_for(r.k, r.m);
  try {
    r.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("return_map: ") + e.what(), "return_map", 0);
  }
  return r;
}

Family family_from(const Config& cfg) {
  const std::string name = cfg.get_string("map.family", "double_parabola");
  try {
    return parse_family(name);
  } catch (const InvalidArgument&) {
    throw bad_value(cfg, "map.family", "unknown family '" + name + "'");
  }
}

bool use_return_map(const Config& cfg) {
  const std::string src = cfg.get_string("map.source", "family");
  if (src != "family" && src != "return_map") {
    throw bad_value(cfg, "map.source", "expected family or return_map");
  }
  return src == "return_map";
}

struct Artifact {
  std::string name;
  std::string body;
};
using Artifacts = std::vector<Artifact>;

// Writes every artifact with the resolved configuration as a '#' header (after the
// magic line for PGM). Nothing is written if any target exists and `force` is off.
void write_artifacts(const fs::path& dir, bool force, const std::string& header,
                     const Artifacts& arts) {
  for (const Artifact& a : arts) {
    const fs::path p = dir / a.name;
    if (fs::exists(p) && !force) throw IoError("refusing to overwrite " + p.string() + " (use --force)");
  }
  std::string prefix;
  std::istringstream h(header);
  std::string line;
  while (std::getline(h, line)) prefix += "# " + line + "\n";
  for (const Artifact& a : arts) {
    const fs::path p = dir / a.name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open " + p.string() + " for writing");
    if (a.body.rfind("P2\n", 0) == 0) {
      f << "P2\n" << prefix << a.body.substr(3);
    } else {
      f << prefix << a.body;
    }
    f.flush();
    if (!f) throw IoError("write failed for " + p.string());
    std::cout << "wrote " << p.string() << '\n';
  }
}

SweepSpec sweep_spec_from(const Config& cfg) {
  SweepSpec s;
  if (use_return_map(cfg)) {
    s.return_map = return_map_from(cfg);
    s.seed_rule = SeedRule::FixedSeed;
  } else {
    s.family = family_from(cfg);
    s.base_params = cfg.get_doubles("map.params", std::vector<double>(family_arity(s.family), 0.0));
  }
  s.axis_i = static_cast<std::size_t>(cfg.get_int("sweep.axis_i", 0));
  s.axis_j = static_cast<std::size_t>(cfg.get_int("sweep.axis_j", 1));
  const auto ir = cfg.get_doubles("sweep.i_range", {-1.0, 1.0});
  const auto jr = cfg.get_doubles("sweep.j_range", {-1.0, 1.0});
  if (ir.size() != 2) throw bad_value(cfg, "sweep.i_range", "expected lo,hi");
  if (jr.size() != 2) throw bad_value(cfg, "sweep.j_range", "expected lo,hi");
  s.i_min = ir[0];
  s.i_max = ir[1];
  s.j_min = jr[0];
  s.j_max = jr[1];
  s.nx = cfg.get_int("sweep.nx", 64);
  s.ny = cfg.get_int("sweep.ny", 64);
  s.transient = cfg.get_int("sweep.transient", 1024);
  s.max_period = cfg.get_int("sweep.max_period", 16);
  s.samples = cfg.get_int("sweep.samples", 4096);
  s.escape_radius = cfg.get_double("sweep.escape_radius", kDefaultEscapeRadius);
  const std::string rule =
      cfg.get_string("sweep.seed_rule", s.seed_rule == SeedRule::FixedSeed ? "fixed" : "critical");
  if (rule == "critical") {
    s.seed_rule = SeedRule::CriticalPoint;
  } else if (rule == "fixed") {
    s.seed_rule = SeedRule::FixedSeed;
  } else {
    throw bad_value(cfg, "sweep.seed_rule", "expected critical or fixed");
  }
  s.seed = cfg.get_double("sweep.seed", 0.0);
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what(), "sweep", 0);
  }
  return s;
}

struct MapHolder {
  std::unique_ptr<JetMap> map;
  std::vector<double> params;
};

MapHolder jet_map_from(const Config& cfg) {
  MapHolder h;
  if (use_return_map(cfg)) {
    h.map = std::make_unique<ReducedReturnMap>(return_map_from(cfg));
    h.params = cfg.get_doubles("map.params", {0.0, 0.0});
  } else {
    const Family f = family_from(cfg);
    h.map = std::make_unique<ModelJetMap>(f);
    h.params = cfg.get_doubles("map.params", std::vector<double>(family_arity(f), 0.0));
  }
  if (h.params.size() != h.map->param_count()) {
    throw bad_value(cfg, "map.params",
                    "expected " + std::to_string(h.map->param_count()) + " values");
  }
  return h;
}

struct ContinueSetup {
  MapHolder holder;
  BifPoint start;
  std::size_t pi = 0, pj = 1;
  ContinuationOptions opts;
  int direction = 0;
};

ContinueSetup continue_setup(const Config& cfg) {
  ContinueSetup c;
  c.holder = jet_map_from(cfg);
  const std::string kind = cfg.get_string("continue.kind", "sn");
  if (kind != "sn" && kind != "pd") throw bad_value(cfg, "continue.kind", "expected sn or pd");
  const int period = cfg.get_int("continue.period", 1);
  if (period < 1) throw bad_value(cfg, "continue.period", "must be >= 1");
  const int free_param = cfg.get_int("continue.free_param", 0);
  const std::size_t np = c.holder.params.size();
  if (free_param < 0 || static_cast<std::size_t>(free_param) >= np) {
    throw bad_value(cfg, "continue.free_param", "out of range");
  }
  const double y_guess = cfg.get_double("continue.y_guess", 0.0);
  const double p_guess =
      cfg.get_double("continue.p_guess", c.holder.params[static_cast<std::size_t>(free_param)]);
  const int pi = cfg.get_int("continue.param_i", 0);
  const int pj = cfg.get_int("continue.param_j", 1);
  if (pi < 0 || pj < 0 || static_cast<std::size_t>(pi) >= np || static_cast<std::size_t>(pj) >= np ||
      pi == pj) {
    throw bad_value(cfg, "continue.param_j", "plane indices must be distinct and in range");
  }
  c.pi = static_cast<std::size_t>(pi);
  c.pj = static_cast<std::size_t>(pj);
  c.opts.step = cfg.get_double("continue.step", c.opts.step);
  c.opts.min_step = cfg.get_double("continue.min_step", c.opts.min_step);
  c.opts.max_step = cfg.get_double("continue.max_step", c.opts.max_step);
  c.opts.max_points = cfg.get_int("continue.max_points", c.opts.max_points);
  const auto bounds = cfg.get_doubles(
      "continue.bounds", {c.opts.bounds[0], c.opts.bounds[1], c.opts.bounds[2], c.opts.bounds[3]});
  if (bounds.size() != 4) throw bad_value(cfg, "continue.bounds", "expected i_lo,i_hi,j_lo,j_hi");
  c.opts.bounds = {bounds[0], bounds[1], bounds[2], bounds[3]};
  c.opts.y_bound = cfg.get_double("continue.y_bound", c.opts.y_bound);
  if (!(c.opts.min_step > 0.0) || c.opts.min_step > c.opts.max_step || c.opts.max_points < 2) {
    throw bad_value(cfg, "continue.min_step", "need 0 < min_step <= max_step and max_points >= 2");
  }
  c.direction = cfg.get_int("continue.direction", 0);
  if (c.direction < -1 || c.direction > 1) {
    throw bad_value(cfg, "continue.direction", "expected 1, -1 or 0 (both)");
  }
  c.start = solve_codim1(*c.holder.map, c.holder.params, period,
                         kind == "sn" ? BifKind::SN : BifKind::PD,
                         static_cast<std::size_t>(free_param), y_guess, p_guess);
  return c;
}

std::vector<BifCurve> run_continuation(const ContinueSetup& c) {
  std::vector<BifCurve> curves;
  for (int dir : {1, -1}) {
    if (c.direction != 0 && dir != c.direction) continue;
    ContinuationOptions o = c.opts;
    o.direction = dir;
    curves.push_back(continue_codim1(*c.holder.map, c.start, c.pi, c.pj, o));
  }
  return curves;
}

std::string_view stop_name(StopReason r) {
  switch (r) {
    case StopReason::MaxPoints:
      return "max_points";
    case StopReason::Boundary:
      return "boundary";
    case StopReason::StepUnderflow:
      return "step_underflow";
  }
  return "?";
}

Artifacts cmd_sweep(const Config& cfg, unsigned workers) {
  const SweepSpec spec = sweep_spec_from(cfg);
  const SweepGrid grid = plane_sweep(spec, workers);
  std::ostringstream csv, pgm;
  write_grid_csv(csv, grid);
  write_grid_pgm(pgm, grid);
  return {{"grid.csv", csv.str()}, {"grid.pgm", pgm.str()}};
}

Artifacts cmd_continue(const Config& cfg) {
  const ContinueSetup setup = continue_setup(cfg);
  const std::vector<BifCurve> curves = run_continuation(setup);
  std::ostringstream body;
  BifCurve merged = curves.front();
  merged.points.clear();
  // Reverse branch first so the file is ordered along the curve.
  for (std::size_t c = curves.size(); c-- > 0;) {
    const auto& pts = curves[c].points;
    if (c == 1) {
      merged.points.insert(merged.points.end(), pts.rbegin(), pts.rend() - 1);
    } else {
      merged.points.insert(merged.points.end(), pts.begin(), pts.end());
    }
  }
  for (const BifCurve& c : curves) body << "# stop: " << stop_name(c.stop) << '\n';
  write_curve_csv(body, merged);
  return {{"curve.csv", body.str()}};
}

Artifacts cmd_codim2(const Config& cfg) {
  const ContinueSetup setup = continue_setup(cfg);
  const std::vector<BifCurve> curves = run_continuation(setup);
  std::ostringstream body;
  body << "kind,period,param_i,param_j,Y,multiplier,g2,l1\n";
  std::vector<std::array<double, 2>> seen;
  for (const BifCurve& c : curves) {
    for (const BifPoint& b : c.codim2_hits) {
      const std::array<double, 2> at{b.orbit.params[setup.pi], b.orbit.params[setup.pj]};
      bool dup = false;
      for (const auto& s : seen) {
        dup = dup || (std::abs(s[0] - at[0]) <= 1e-7 && std::abs(s[1] - at[1]) <= 1e-7);
      }
      if (dup) continue;
      seen.push_back(at);
      body << bif_kind_name(b.kind) << ',' << b.orbit.period << ',' << g17(at[0]) << ','
           << g17(at[1]) << ',' << g17(b.orbit.Y) << ',' << g17(b.orbit.multiplier) << ','
           << g17(b.test_values.at("g2")) << ',' << g17(b.test_values.at("l1")) << '\n';
    }
  }
  return {{"codim2.csv", body.str()}};
}

Artifacts cmd_rescale_verify(const Config& cfg) {
  const std::vector<int> ks = cfg.get_ints("rescale.k", {6, 8, 10, 12});
  const std::vector<int> ms = cfg.get_ints("rescale.m", ks);
  if (ms.size() != ks.size()) throw bad_value(cfg, "rescale.m", "must match rescale.k in length");
  const double radius = cfg.get_double("rescale.radius", 2.0);
  const int grid = cfg.get_int("rescale.grid", 21);
  const double h = cfg.get_double("rescale.h", 1e-3);
  if (!(radius > 0.0)) throw bad_value(cfg, "rescale.radius", "must be positive");
  if (grid < 2) throw bad_value(cfg, "rescale.grid", "must be >= 2");
  std::ostringstream body;
  body << "k,m,err_thm1,err_thm2,M3_coeff,measured_coeff,coeff_rel_diff,excluded\n";
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const ReturnMapConfig rc = return_map_from(cfg, ks[i], ms[i]);
    const LimitMapError e = limit_map_error(rc, radius, grid);
    const double m3 = rescale_frame(rc).M3_coeff;
    const double meas = measured_linear_coefficient(rc, h);
    const double rel = m3 != 0.0 ? std::abs(meas - m3) / std::abs(m3) : std::abs(meas);
    body << rc.k << ',' << rc.m << ',' << g17(e.err_thm1) << ',' << g17(e.err_thm2) << ','
         << g17(m3) << ',' << g17(meas) << ',' << g17(rel) << ',' << e.excluded << '\n';
  }
  return {{"rescale.csv", body.str()}};
}

Artifacts cmd_sequence_plan(const Config& cfg) {
  const std::string kind = cfg.get_string("plan.kind", "saddle");
  const int count = cfg.get_int("plan.count", 40);
  if (count < 1) throw bad_value(cfg, "plan.count", "must be >= 1");
  std::vector<double> s_def;
  std::vector<int> m_def;
  for (int j = 1; j <= count; ++j) {
    s_def.push_back(j);
    m_def.push_back(j * j);
  }
  const std::vector<double> s = cfg.get_doubles("plan.s", s_def);
  const std::vector<int> m = cfg.get_ints("plan.m", m_def);
  SequencePlan plan;
  try {
    if (kind == "saddle") {
      plan = plan_sequence_saddle(cfg.get_double("plan.theta0", 1.5), cfg.get_double("plan.gamma", 2.0),
                                  s, m);
    } else if (kind == "saddle_focus") {
      plan = plan_sequence_saddle_focus(
          cfg.get_double("plan.phi0", 0.7), cfg.get_double("plan.lambda", 0.4),
          cfg.get_double("plan.gamma", 2.0), s, m, cfg.get_double("plan.c", 1.0),
          cfg.get_double("plan.nu", 0.0), cfg.get_ints("plan.k", {}));
    } else {
      throw bad_value(cfg, "plan.kind", "expected saddle or saddle_focus");
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what(), "plan", 0);
  }
  std::ostringstream body;
  for (const std::string& d : plan.diagnostics) body << "# skipped " << d << '\n';
  body << "j,k,m,n,lo,hi,diam,s,end1,end2,arccos_arg\n";
  for (const SequenceEntry& e : plan.entries) {
    body << e.j << ',' << e.k << ',' << e.m << ',' << e.n << ',' << g17(e.lo) << ',' << g17(e.hi)
         << ',' << g17(e.diam()) << ',' << g17(e.s) << ',' << g17(e.end1) << ',' << g17(e.end2)
         << ',' << g17(e.arccos_arg) << '\n';
  }
  return {{"plan.csv", body.str()}};
}

Artifacts cmd_shrimp_predict(const Config& cfg) {
  const std::vector<int> ks = cfg.get_ints("predict.k", {8, 10, 12});
  // Fold of Y -> M2 - (M1 - Y^2)^2 on the M1 = 0 line.
  const ModelJetMap limit(Family::DoubleParabola);
  const double m1_event = cfg.get_double("predict.m1", 0.0);
  const BifPoint sn = solve_codim1(limit, {m1_event, -0.5}, 1, BifKind::SN, 1, -0.6, -0.5);
  const std::array<double, 2> M_event{m1_event, sn.orbit.params[1]};
  std::ostringstream body;
  body << "k,m,M1_event,M2_event,mu1_pred,mu2_pred,mu1_leading,mu2_leading,mu1_measured,"
          "mu2_measured,rel_distance,norm_ratio\n";
  double prev_norm = 0.0;
  for (int k : ks) {
    const ReturnMapConfig rc = return_map_from(cfg, k, k);
    const auto pred = predict_shrimp_location(rc, M_event);
    const auto lead = predict_shrimp_location_leading(rc, M_event);
    const ReducedReturnMap rmap(rc);
    const BifPoint meas =
        solve_codim1(rmap, {M_event[0], M_event[1]}, 1, BifKind::SN, 1, sn.orbit.Y, M_event[1]);
    const auto mu = rmap.frame().mu_from_M(meas.orbit.params[0], meas.orbit.params[1]);
    const double pn = std::hypot(pred[0], pred[1]);
    const double rel = std::hypot(mu[0] - pred[0], mu[1] - pred[1]) / pn;
    body << k << ',' << k << ',' << g17(M_event[0]) << ',' << g17(M_event[1]) << ','
         << g17(pred[0]) << ',' << g17(pred[1]) << ',' << g17(lead[0]) << ',' << g17(lead[1])
         << ',' << g17(mu[0]) << ',' << g17(mu[1]) << ',' << g17(rel) << ',';
    if (prev_norm > 0.0) body << g17(pn / prev_norm);
    body << '\n';
    prev_norm = pn;
  }
  return {{"predict.csv", body.str()}};
}

int run(const RunConfig& rc) {
  Config cfg;
  if (!rc.config_path.empty()) cfg = Config::load(rc.config_path);
  for (const std::string& o : rc.overrides) cfg.set(o);
  cfg.require_known(kKnownKeys);

  const fs::path dir(rc.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  const unsigned workers = rc.workers > 0 ? static_cast<unsigned>(rc.workers) : default_workers();

  Artifacts arts;
  if (rc.command == "sweep") {
    arts = cmd_sweep(cfg, workers);
  } else if (rc.command == "continue") {
    arts = cmd_continue(cfg);
  } else if (rc.command == "codim2") {
    arts = cmd_codim2(cfg);
  } else if (rc.command == "rescale-verify") {
    arts = cmd_rescale_verify(cfg);
  } else if (rc.command == "sequence-plan") {
    arts = cmd_sequence_plan(cfg);
  } else {
    arts = cmd_shrimp_predict(cfg);
  }
  write_artifacts(dir, rc.force, "shrimplab " + rc.command + "\n" + cfg.resolved(), arts);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shrimplab: stability windows near homoclinic tangencies"};
  app.require_subcommand(1);
  RunConfig rc;
  const char* names[] = {"sweep", "continue", "codim2", "rescale-verify", "sequence-plan",
                         "shrimp-predict"};
  const char* help[] = {"rasterise attractor types over a parameter plane",
                        "continue a fold or flip curve",
                        "locate cusp and degenerate-flip points",
                        "measure convergence to the limit map",
                        "plan interval sequences in the modulus",
                        "predict shrimp centres in the splitting parameters"};
  for (int i = 0; i < 6; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", rc.config_path, "config file (section.key = value)");
    sub->add_option("--out", rc.out_dir, "output directory");
    sub->add_option("--set", rc.overrides, "override key=value (repeatable)");
    sub->add_option("--workers", rc.workers, "worker threads (default: SHRIMPLAB_WORKERS or all)")
        ->check(CLI::Range(1, 1024));
    sub->add_flag("--force", rc.force, "overwrite existing outputs");
    sub->callback([&rc, name = std::string(names[i])] { rc.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  try {
    return run(rc);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  }
}
