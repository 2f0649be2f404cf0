#include "shrimplab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "shrimplab/errors.hpp"
#include "shrimplab/kernels.hpp"
#include "shrimplab/taylor.hpp"

namespace shrimplab {

namespace {

double axis_value(double lo, double hi, int idx, int n) {
  if (idx == n - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(idx) / static_cast<double>(n - 1);
}

double start_seed(const SweepSpec& spec) {
  return spec.seed_rule == SeedRule::FixedSeed ? spec.seed : 0.0;
}

// Minimal p with two consecutive recurrences at the end of the tail, or 0.
template <typename Dist>
int detect_period(int tail_len, int max_period, Dist dist) {
  const int last = tail_len - 1;
  for (int p = 1; p <= max_period; ++p) {
    if (last - 2 * p < 0) break;
    if (dist(last, last - p) <= kRecurrenceTol && dist(last - p, last - 2 * p) <= kRecurrenceTol) {
      return p;
    }
  }
  return 0;
}

struct RawOrbit {
  bool escaped = false;
  double lyap = 0.0;
  std::vector<double> tail;
};

// One cell, or a whole row when `count` > 1, through the orbit kernels.
void run_family(const SweepSpec& spec, const std::vector<std::vector<double>>& params,
                const std::vector<double>& seeds, std::vector<RawOrbit>& out, bool scalar_only) {
  const std::size_t n = seeds.size();
  const std::size_t tail = static_cast<std::size_t>(spec.tail());
  std::vector<std::uint8_t> escaped(n);
  std::vector<double> mant(n), tail_buf(n * tail);
  std::vector<std::int64_t> expo(n);
  kernels::OrbitBatch b;
  b.family = spec.family;
  b.count = n;
  for (std::size_t i = 0; i < params.size(); ++i) b.params[i] = params[i].data();
  b.seed = seeds.data();
  b.transient = spec.transient;
  b.samples = spec.samples;
  b.escape_radius = spec.escape_radius;
  b.tail = spec.tail();
  b.escaped = escaped.data();
  b.lyap_mantissa = mant.data();
  b.lyap_exponent = expo.data();
  b.tail_out = tail_buf.data();
  if (scalar_only) {
    kernels::orbit_scalar(b, 0, n);
  } else {
    kernels::run_orbits(b);
  }
  out.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    RawOrbit& r = out[c];
    r.escaped = escaped[c] != 0;
    r.lyap = r.escaped ? 0.0
                       : kernels::log_from_parts(mant[c], expo[c]) / static_cast<double>(spec.samples);
    r.tail.assign(tail_buf.begin() + static_cast<std::ptrdiff_t>(c * tail),
                  tail_buf.begin() + static_cast<std::ptrdiff_t>((c + 1) * tail));
  }
}

enum class Verdict { Attracting, Repelling, None };

Verdict family_verdict(const SweepSpec& spec, const double* p, const RawOrbit& r, int& period) {
  const int L = static_cast<int>(r.tail.size());
  period = detect_period(L, spec.max_period,
                         [&](int a, int b) { return std::abs(r.tail[a] - r.tail[b]); });
  if (period == 0) return Verdict::None;
  double mult = 1.0;
  for (int q = 0; q < period; ++q) {
    mult *= std::abs(family_derivative(spec.family, p, r.tail[L - 1 - q]));
  }
  return mult < 1.0 ? Verdict::Attracting : Verdict::Repelling;
}

CellOutcome from_lyap(double lyap) {
  CellOutcome c;
  c.kind = lyap > 0.0 ? Outcome::Chaotic : Outcome::Unresolved;
  c.lyap = lyap;
  return c;
}

CellOutcome classify_family(const SweepSpec& spec, const double* p, const RawOrbit& first) {
  if (first.escaped) return CellOutcome{Outcome::Escaped, 0, 0.0};
  int period = 0;
  const Verdict v = family_verdict(spec, p, first, period);
  if (v == Verdict::Attracting) return CellOutcome{Outcome::Period, period, 0.0};
  if (v == Verdict::None) return from_lyap(first.lyap);
  // The seed landed on a repelling cycle; nudge it once.
  const double s0 = start_seed(spec);
  std::vector<std::vector<double>> params(family_arity(spec.family));
  for (std::size_t i = 0; i < params.size(); ++i) params[i] = {p[i]};
  std::vector<RawOrbit> again;
  run_family(spec, params, {s0 + 1e-7 * (1.0 + std::abs(s0))}, again, true);
  const RawOrbit& r = again[0];
  if (r.escaped) return CellOutcome{Outcome::Escaped, 0, 0.0};
  if (family_verdict(spec, p, r, period) == Verdict::Attracting) {
    return CellOutcome{Outcome::Period, period, 0.0};
  }
  return from_lyap(r.lyap);
}

CellOutcome scan_return_map(const SweepSpec& spec, const RescaleFrame& frame, double mu1,
                            double mu2) {
  const ReturnMapConfig& cfg = *spec.return_map;
  const std::array<double, 2> M = frame.M_from_mu(mu1, mu2);
  const int tail = spec.tail();
  const int total = spec.transient + spec.samples;
  std::vector<std::array<double, 3>> states(static_cast<std::size_t>(tail));
  std::array<double, 2> X{0.0, 0.0};
  double Y = start_seed(spec);
  std::array<double, 3> v{0.0, 0.0, 1.0};
  double log_sum = 0.0;
  auto out_of_range = [&](double a) { return !(std::abs(a) <= spec.escape_radius); };
  try {
    for (int s = 0; s < total; ++s) {
      if (s < spec.transient) {
        const RescaledState n = rescaled_step<double>(cfg, frame, X, Y, M[0], M[1]);
        X = n.X;
        Y = n.Y;
      } else {
        using D = Taylor<1>;
        std::array<D, 2> Xd{D(X[0]), D(X[1])};
        D Yd(Y);
        Xd[0].c[1] = v[0];
        Xd[1].c[1] = v[1];
        Yd.c[1] = v[2];
        const RescaledStateT<D> n = rescaled_step<D>(cfg, frame, Xd, Yd, M[0], M[1]);
        X = {n.X[0].c[0], n.X[1].c[0]};
        Y = n.Y.c[0];
        v = {n.X[0].c[1], n.X[1].c[1], n.Y.c[1]};
        const double norm = std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
        if (norm > 0.0 && std::isfinite(norm)) {
          log_sum += std::log(norm);
          for (double& t : v) t /= norm;
        } else {
          log_sum += std::log(1e-300);
          v = {0.0, 0.0, 1.0};
        }
      }
      if (out_of_range(X[0]) || out_of_range(X[1]) || out_of_range(Y)) {
        return CellOutcome{Outcome::Escaped, 0, 0.0};
      }
      if (s >= total - tail) states[static_cast<std::size_t>(s - (total - tail))] = {X[0], X[1], Y};
    }
  } catch (const EscapeError&) {
    return CellOutcome{Outcome::Escaped, 0, 0.0};
  }
  const int period = detect_period(tail, spec.max_period, [&](int a, int b) {
    const auto& u = states[static_cast<std::size_t>(a)];
    const auto& w = states[static_cast<std::size_t>(b)];
    return std::max({std::abs(u[0] - w[0]), std::abs(u[1] - w[1]), std::abs(u[2] - w[2])});
  });
  if (period > 0) return CellOutcome{Outcome::Period, period, 0.0};
  return from_lyap(log_sum / static_cast<double>(spec.samples));
}

void sweep_row(const SweepSpec& spec, const RescaleFrame* frame, int j, CellOutcome* row) {
  const int nx = spec.nx;
  if (spec.return_map) {
    for (int i = 0; i < nx; ++i) {
      double mu[2] = {0.0, 0.0};
      mu[spec.axis_i] = spec.param_i(i);
      mu[spec.axis_j] = spec.param_j(j);
      row[i] = scan_return_map(spec, *frame, mu[0], mu[1]);
    }
    return;
  }
  const std::size_t arity = family_arity(spec.family);
  std::vector<std::vector<double>> params(arity, std::vector<double>(static_cast<std::size_t>(nx)));
  for (std::size_t a = 0; a < arity; ++a) {
    std::fill(params[a].begin(), params[a].end(), spec.base_params[a]);
  }
  for (int i = 0; i < nx; ++i) {
    params[spec.axis_i][static_cast<std::size_t>(i)] = spec.param_i(i);
    params[spec.axis_j][static_cast<std::size_t>(i)] = spec.param_j(j);
  }
  std::vector<double> seeds(static_cast<std::size_t>(nx), start_seed(spec));
  std::vector<RawOrbit> raw;
  run_family(spec, params, seeds, raw, false);
  for (int i = 0; i < nx; ++i) {
    double p[3] = {0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < arity; ++a) p[a] = params[a][static_cast<std::size_t>(i)];
    row[i] = classify_family(spec, p, raw[static_cast<std::size_t>(i)]);
  }
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_header(std::ostream& out, const std::string& header) {
  std::istringstream in(header);
  std::string line;
  while (std::getline(in, line)) out << "# " << line << '\n';
}

}  // namespace

void SweepSpec::validate_scan() const {
  if (transient < 1) throw InvalidArgument("sweep: transient must be >= 1");
  if (max_period < 1) throw InvalidArgument("sweep: max_period must be >= 1");
  if (samples < tail()) {
    throw InvalidArgument("sweep: samples must be >= 2 * max_period + 1");
  }
  if (!(escape_radius > 0.0) || !std::isfinite(escape_radius)) {
    throw InvalidArgument("sweep: escape_radius must be positive and finite");
  }
  if (!std::isfinite(seed)) throw InvalidArgument("sweep: seed must be finite");
  if (return_map) {
    return_map->validate();
  } else {
    const std::size_t arity = family_arity(family);
    if (base_params.size() != arity) {
      throw InvalidArgument("sweep: base_params must hold " + std::to_string(arity) + " values");
    }
    for (double v : base_params) {
      if (!std::isfinite(v)) throw InvalidArgument("sweep: base_params must be finite");
    }
  }
}

void SweepSpec::validate() const {
  validate_scan();
  if (nx < 2 || ny < 2) throw InvalidArgument("sweep: nx and ny must be >= 2");
  for (double v : {i_min, i_max, j_min, j_max}) {
    if (!std::isfinite(v)) throw InvalidArgument("sweep: plane ranges must be finite");
  }
  const std::size_t n = return_map ? 2 : family_arity(family);
  if (axis_i >= n || axis_j >= n) {
    throw InvalidArgument(return_map ? "sweep: return-map axes are mu1 (0) and mu2 (1)"
                                     : "sweep: axis index out of range");
  }
  if (axis_i == axis_j) throw InvalidArgument("sweep: axes must differ");
}

double SweepSpec::param_i(int i) const { return axis_value(i_min, i_max, i, nx); }
double SweepSpec::param_j(int j) const { return axis_value(j_min, j_max, j, ny); }

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Period:
      return "period";
    case Outcome::Chaotic:
      return "chaotic";
    case Outcome::Escaped:
      return "escaped";
    case Outcome::Unresolved:
      return "unresolved";
  }
  return "?";
}

CellOutcome attractor_scan(const SweepSpec& spec, const std::vector<double>& params) {
  spec.validate_scan();
  if (spec.return_map) {
    if (params.size() != 2) throw InvalidArgument("attractor_scan: expected (mu1, mu2)");
    const RescaleFrame frame = rescale_frame(*spec.return_map);
    return scan_return_map(spec, frame, params[0], params[1]);
  }
  const std::size_t arity = family_arity(spec.family);
  if (params.size() != arity) {
    throw InvalidArgument("attractor_scan: expected " + std::to_string(arity) + " parameters");
  }
  std::vector<std::vector<double>> cols(arity);
  for (std::size_t a = 0; a < arity; ++a) cols[a] = {params[a]};
  std::vector<RawOrbit> raw;
  run_family(spec, cols, {start_seed(spec)}, raw, true);
  return classify_family(spec, params.data(), raw[0]);
}

unsigned default_workers() {
  if (const char* env = std::getenv("SHRIMPLAB_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

SweepGrid plane_sweep(const SweepSpec& spec, unsigned workers) {
  spec.validate();
  SweepGrid grid;
  grid.spec = spec;
  grid.cells.resize(static_cast<std::size_t>(spec.nx) * static_cast<std::size_t>(spec.ny));
  std::optional<RescaleFrame> frame;
  if (spec.return_map) frame = rescale_frame(*spec.return_map);
  const RescaleFrame* fp = frame ? &*frame : nullptr;

  std::atomic<int> next{0};
  auto work = [&] {
    for (int j = next.fetch_add(1); j < spec.ny; j = next.fetch_add(1)) {
      sweep_row(spec, fp, j, grid.cells.data() + static_cast<std::size_t>(j) * spec.nx);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(spec.ny)));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  return grid;
}

std::vector<Component> shrimp_locate(const SweepGrid& grid, int period) {
  const int nx = grid.spec.nx, ny = grid.spec.ny;
  auto match = [&](int i, int j) {
    const CellOutcome& c = grid.at(i, j);
    return c.kind == Outcome::Period && c.period == period;
  };
  std::vector<int> label(grid.cells.size(), -1);
  std::vector<Component> out;
  std::vector<std::pair<int, int>> stack;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * nx + i;
      if (label[idx] >= 0 || !match(i, j)) continue;
      Component comp{period, 0, i, i, j, j};
      const int id = static_cast<int>(out.size());
      label[idx] = id;
      stack.push_back({i, j});
      while (!stack.empty()) {
        const auto [ci, cj] = stack.back();
        stack.pop_back();
        ++comp.count;
        comp.i_min = std::min(comp.i_min, ci);
        comp.i_max = std::max(comp.i_max, ci);
        comp.j_min = std::min(comp.j_min, cj);
        comp.j_max = std::max(comp.j_max, cj);
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          const int ni = ci + di[d], nj = cj + dj[d];
          if (ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
          const std::size_t nidx = static_cast<std::size_t>(nj) * nx + ni;
          if (label[nidx] >= 0 || !match(ni, nj)) continue;
          label[nidx] = id;
          stack.push_back({ni, nj});
        }
      }
      out.push_back(comp);
    }
  }
  return out;
}

int gray_level(const CellOutcome& c, int max_period) {
  switch (c.kind) {
    case Outcome::Chaotic:
      return 0;
    case Outcome::Unresolved:
      return 16;
    case Outcome::Escaped:
      return 255;
    case Outcome::Period: {
      const double span = static_cast<double>(std::max(1, max_period - 1));
      return 48 + static_cast<int>(std::lround(160.0 * (c.period - 1) / span));
    }
  }
  return 16;
}

void write_grid_csv(std::ostream& out, const SweepGrid& grid, const std::string& header) {
  write_header(out, header);
  out << "i,j,param_i,param_j,outcome,period_or_lyap\n";
  for (int j = 0; j < grid.spec.ny; ++j) {
    const std::string pj = fmt17(grid.spec.param_j(j));
    for (int i = 0; i < grid.spec.nx; ++i) {
      const CellOutcome& c = grid.at(i, j);
      out << i << ',' << j << ',' << fmt17(grid.spec.param_i(i)) << ',' << pj << ','
          << outcome_name(c.kind) << ',';
      if (c.kind == Outcome::Period) {
        out << c.period;
      } else if (c.kind != Outcome::Escaped) {
        out << fmt17(c.lyap);
      }
      out << '\n';
    }
  }
}

void write_grid_pgm(std::ostream& out, const SweepGrid& grid, const std::string& header) {
  out << "P2\n";
  write_header(out, header);
  out << grid.spec.nx << ' ' << grid.spec.ny << "\n255\n";
  for (int j = grid.spec.ny - 1; j >= 0; --j) {
    for (int i = 0; i < grid.spec.nx; ++i) {
      if (i > 0) out << ' ';
      out << gray_level(grid.at(i, j), grid.spec.max_period);
    }
    out << '\n';
  }
}

void export_grid(const SweepGrid& grid, const std::filesystem::path& stem,
                 const std::string& header) {
  const auto write = [&](const std::string& ext, auto&& fn) {
    std::filesystem::path p = stem;
    p += ext;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open " + p.string() + " for writing");
    fn(f);
    f.flush();
    if (!f) throw IoError("write failed for " + p.string());
  };
  write(".csv", [&](std::ostream& o) { write_grid_csv(o, grid, header); });
  write(".pgm", [&](std::ostream& o) { write_grid_pgm(o, grid, header); });
}

SweepGrid import_grid_csv(std::istream& in, const SweepSpec& spec) {
  SweepGrid grid;
  grid.spec = spec;
  const std::size_t n = static_cast<std::size_t>(spec.nx) * static_cast<std::size_t>(spec.ny);
  grid.cells.resize(n);
  std::vector<bool> seen(n, false);
  std::string line;
  bool header_done = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_done) {
      if (line != "i,j,param_i,param_j,outcome,period_or_lyap") {
        throw InvalidArgument("grid csv: unexpected header at line " + std::to_string(lineno));
      }
      header_done = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() == 5 && !line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 6) throw InvalidArgument("grid csv: bad row at line " + std::to_string(lineno));
    int i = 0, j = 0;
    try {
      i = std::stoi(f[0]);
      j = std::stoi(f[1]);
    } catch (const std::exception&) {
      throw InvalidArgument("grid csv: bad index at line " + std::to_string(lineno));
    }
    if (i < 0 || j < 0 || i >= spec.nx || j >= spec.ny) {
      throw InvalidArgument("grid csv: cell out of range at line " + std::to_string(lineno));
    }
    CellOutcome c;
    try {
      if (f[4] == "period") {
        c.kind = Outcome::Period;
        c.period = std::stoi(f[5]);
      } else if (f[4] == "chaotic" || f[4] == "unresolved") {
        c.kind = f[4] == "chaotic" ? Outcome::Chaotic : Outcome::Unresolved;
        c.lyap = std::strtod(f[5].c_str(), nullptr);
      } else if (f[4] == "escaped") {
        c.kind = Outcome::Escaped;
      } else {
        throw InvalidArgument("grid csv: unknown outcome at line " + std::to_string(lineno));
      }
    } catch (const std::logic_error&) {
      throw InvalidArgument("grid csv: bad value at line " + std::to_string(lineno));
    }
    const std::size_t idx = static_cast<std::size_t>(j) * spec.nx + i;
    grid.cells[idx] = c;
    seen[idx] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw InvalidArgument("grid csv: missing cells");
  }
  return grid;
}

SweepGrid import_grid_csv(const std::filesystem::path& path, const SweepSpec& spec) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  return import_grid_csv(f, spec);
}

}  // namespace shrimplab
