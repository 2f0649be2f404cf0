#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "shrimplab/bifurcation.hpp"
#include "shrimplab/errors.hpp"
#include "shrimplab/maps.hpp"
#include "shrimplab/sweep.hpp"

using namespace shrimplab;

namespace {

SweepSpec plane(Family f, std::vector<double> base, double i0, double i1, double j0, double j1,
                int n) {
  SweepSpec s;
  s.family = f;
  s.base_params = std::move(base);
  s.i_min = i0;
  s.i_max = i1;
  s.j_min = j0;
  s.j_max = j1;
  s.nx = s.ny = n;
  return s;
}

CellOutcome parabola(double m1) {
  SweepSpec s;
  s.family = Family::Parabola;
  s.base_params = {m1};
  return attractor_scan(s, {m1});
}

}  // namespace

TEST_SUITE("sweep") {

TEST_CASE("spec validation") {
  SweepSpec s;
  CHECK_NOTHROW(s.validate());
  SweepSpec a = s;
  a.nx = 1;
  CHECK_THROWS_AS(a.validate(), InvalidArgument);
  a = s;
  a.transient = 0;
  CHECK_THROWS_AS(a.validate(), InvalidArgument);
  a = s;
  a.max_period = 0;
  CHECK_THROWS_AS(a.validate(), InvalidArgument);
  a = s;
  a.escape_radius = 0.0;
  CHECK_THROWS_AS(a.validate(), InvalidArgument);
  a = s;
  a.samples = 2 * a.max_period;
  CHECK_THROWS_AS(a.validate(), InvalidArgument);
  a = s;
  a.axis_j = 0;
  CHECK_THROWS_AS(a.validate(), InvalidArgument);
  a = s;
  a.base_params = {0.0};
  CHECK_THROWS_AS(a.validate(), InvalidArgument);
  a = s;
  a.family = Family::Parabola;
  a.base_params = {0.0};
  CHECK_NOTHROW(a.validate_scan());
  CHECK_THROWS_AS(a.validate(), InvalidArgument);
}

TEST_CASE("attractor_scan examples") {
  const CellOutcome a = attractor_scan(SweepSpec{}, {0.0, 0.0});
  CHECK(a.kind == Outcome::Period);
  CHECK(a.period == 1);
  const CellOutcome esc = parabola(2.1);
  CHECK(esc.kind == Outcome::Escaped);
  CHECK(esc.lyap == 0.0);
  const CellOutcome chaos = parabola(2.0);
  CHECK(chaos.kind == Outcome::Chaotic);
  CHECK(std::abs(chaos.lyap - std::log(2.0)) <= 0.05);
  CHECK(parabola(1.0).kind == Outcome::Period);
  CHECK(parabola(1.0).period == 2);
  CHECK(parabola(0.5).period == 1);
  CHECK(parabola(1.3).period == 4);
  CHECK(parabola(1.8).kind == Outcome::Chaotic);
  CHECK(parabola(1.75).period == 3);
  CHECK_THROWS_AS(attractor_scan(SweepSpec{}, {0.0}), InvalidArgument);
}

TEST_CASE("constant plane") {
  const SweepGrid g = plane_sweep(plane(Family::DoubleParabola, {0, 0}, 0, 0, 0, 0, 2));
  REQUIRE(g.cells.size() == 4);
  for (const CellOutcome& c : g.cells) {
    CHECK(c.kind == Outcome::Period);
    CHECK(c.period == 1);
  }
  std::ostringstream pgm;
  write_grid_pgm(pgm, g);
  CHECK(pgm.str() == "P2\n2 2\n255\n48 48\n48 48\n");
  const auto comps = shrimp_locate(g, 1);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].count == 4);
  CHECK(comps[0].i_min == 0);
  CHECK(comps[0].i_max == 1);
  CHECK(comps[0].j_max == 1);
}

TEST_CASE("shrimp3 with zero M3 sweeps like the double parabola") {
  const SweepSpec a = plane(Family::DoubleParabola, {0, 0}, -0.5, 1.5, -1.0, 1.5, 40);
  SweepSpec b = a;
  b.family = Family::Shrimp3;
  b.base_params = {0, 0, 0};
  CHECK(plane_sweep(a).cells == plane_sweep(b).cells);
}

TEST_CASE("worker count does not change the grid") {
  const SweepSpec s = plane(Family::DoubleParabola, {0, 0}, -0.5, 1.5, -1.0, 1.5, 48);
  const SweepGrid one = plane_sweep(s, 1);
  for (unsigned w : {2u, 4u, 8u, 64u}) CHECK(plane_sweep(s, w).cells == one.cells);
}

TEST_CASE("grid invariants") {
  SweepSpec s = plane(Family::DoubleParabola, {0, 0}, -0.5, 1.5, -1.0, 1.5, 40);
  s.max_period = 8;
  s.samples = 512;
  const SweepGrid g = plane_sweep(s, 4);
  CHECK(g.cells.size() == 1600);
  for (const CellOutcome& c : g.cells) {
    if (c.kind == Outcome::Period) {
      CHECK(c.period >= 1);
      CHECK(c.period <= 8);
    }
    if (c.kind == Outcome::Chaotic) CHECK(c.lyap > 0.0);
    if (c.kind == Outcome::Escaped) CHECK(c.lyap == 0.0);
  }
}

TEST_CASE("period labels re-verify as attracting orbits") {
  const SweepSpec s = plane(Family::DoubleParabola, {0, 0}, -0.5, 1.5, -1.0, 1.5, 64);
  const SweepGrid g = plane_sweep(s, 4);
  std::vector<std::pair<int, int>> labelled;
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      if (g.at(i, j).kind == Outcome::Period) labelled.push_back({i, j});
    }
  }
  REQUIRE(labelled.size() >= 50);
  std::mt19937_64 rng(13);
  std::shuffle(labelled.begin(), labelled.end(), rng);
  const ModelJetMap dp(Family::DoubleParabola);
  for (std::size_t n = 0; n < 50; ++n) {
    const auto [i, j] = labelled[n];
    const std::vector<double> p{s.param_i(i), s.param_j(j)};
    const int period = g.at(i, j).period;
    const double y = iterate_n(ModelMap(Family::DoubleParabola, p), 0.0, s.transient + s.samples).y;
    const PeriodicOrbit o = find_periodic_orbit(dp, p, period, y);
    CAPTURE(p[0]);
    CAPTURE(p[1]);
    CHECK(o.period == period);
    CHECK(std::abs(o.multiplier) < 1.0);
  }
}

TEST_CASE("refinement keeps the outcome of uniform neighbourhoods") {
  const int n = 33;
  SweepSpec coarse = plane(Family::DoubleParabola, {0, 0}, -0.5, 1.5, -1.0, 1.5, n);
  SweepSpec fine = coarse;
  fine.nx = fine.ny = 2 * n - 1;
  const SweepGrid gc = plane_sweep(coarse, 4);
  const SweepGrid gf = plane_sweep(fine, 4);
  auto same = [](const CellOutcome& a, const CellOutcome& b) {
    return a.kind == b.kind && a.period == b.period;
  };
  int checked = 0;
  for (int j = 1; j + 1 < n; ++j) {
    for (int i = 1; i + 1 < n; ++i) {
      const CellOutcome& c = gc.at(i, j);
      if (!(same(c, gc.at(i - 1, j)) && same(c, gc.at(i + 1, j)) && same(c, gc.at(i, j - 1)) &&
            same(c, gc.at(i, j + 1)))) {
        continue;
      }
      ++checked;
      CHECK(same(gf.at(2 * i, 2 * j), c));
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("components") {
  SweepSpec s = plane(Family::DoubleParabola, {0, 0}, 0, 1, 0, 1, 6);
  SweepGrid g;
  g.spec = s;
  g.cells.resize(36);
  for (int j = 0; j < 6; ++j) {
    for (int i = 0; i < 6; ++i) {
      g.cells[static_cast<std::size_t>(j * 6 + i)] =
          (i + j) % 2 == 0 ? CellOutcome{Outcome::Period, 3, 0.0} : CellOutcome{Outcome::Chaotic, 0, 0.5};
    }
  }
  const auto comps = shrimp_locate(g, 3);
  CHECK(comps.size() == 18);
  for (const Component& c : comps) {
    CHECK(c.count == 1);
    CHECK(c.i_min == c.i_max);
  }
  CHECK(shrimp_locate(g, 2).empty());
  // Two blocks joined through an edge make one component; a diagonal touch does not.
  for (auto& c : g.cells) c = CellOutcome{Outcome::Escaped, 0, 0.0};
  g.cells[0] = g.cells[1] = CellOutcome{Outcome::Period, 2, 0.0};
  g.cells[7] = CellOutcome{Outcome::Period, 2, 0.0};
  g.cells[14] = CellOutcome{Outcome::Period, 2, 0.0};
  const auto two = shrimp_locate(g, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].count == 3);
  CHECK(two[0].i_max == 1);
  CHECK(two[0].j_max == 1);
  CHECK(two[1].count == 1);
}

TEST_CASE("gray levels") {
  CHECK(gray_level({Outcome::Chaotic, 0, 0.3}, 16) == 0);
  CHECK(gray_level({Outcome::Unresolved, 0, -0.1}, 16) == 16);
  CHECK(gray_level({Outcome::Escaped, 0, 0.0}, 16) == 255);
  CHECK(gray_level({Outcome::Period, 1, 0.0}, 16) == 48);
  CHECK(gray_level({Outcome::Period, 16, 0.0}, 16) == 208);
  CHECK(gray_level({Outcome::Period, 1, 0.0}, 1) == 48);
}

TEST_CASE("csv export and round trip") {
  SweepSpec s = plane(Family::DoubleParabola, {0, 0}, -0.5, 1.5, -1.0, 1.5, 24);
  const SweepGrid g = plane_sweep(s, 2);
  std::ostringstream out;
  write_grid_csv(out, g, "first line\nsecond line");
  const std::string text = out.str();
  CHECK(text.rfind("# first line\n# second line\ni,j,param_i,param_j,outcome,period_or_lyap\n", 0) == 0);
  std::istringstream lines(text);
  std::string line;
  int data = 0;
  while (std::getline(lines, line)) {
    if (line[0] != '#') ++data;
  }
  CHECK(data == 24 * 24 + 1);
  std::istringstream in(text);
  const SweepGrid back = import_grid_csv(in, s);
  CHECK(back.cells == g.cells);
  std::istringstream broken("i,j,param_i,param_j,outcome,period_or_lyap\n0,0,0,0,bogus,1\n");
  CHECK_THROWS_AS(import_grid_csv(broken, s), InvalidArgument);
  std::istringstream partial("i,j,param_i,param_j,outcome,period_or_lyap\n0,0,0,0,escaped,\n");
  CHECK_THROWS_AS(import_grid_csv(partial, s), InvalidArgument);
}

TEST_CASE("pgm orientation") {
  SweepSpec s = plane(Family::DoubleParabola, {0, 0}, 0, 1, 0, 1, 2);
  SweepGrid g;
  g.spec = s;
  g.cells = {{Outcome::Chaotic, 0, 1.0}, {Outcome::Escaped, 0, 0.0}, {Outcome::Period, 1, 0.0},
             {Outcome::Unresolved, 0, 0.0}};
  std::ostringstream out;
  write_grid_pgm(out, g, "h");
  CHECK(out.str() == "P2\n# h\n2 2\n255\n48 16\n0 255\n");
}

TEST_CASE("export reports unwritable paths") {
  const SweepGrid g = plane_sweep(plane(Family::DoubleParabola, {0, 0}, 0, 0, 0, 0, 2));
  CHECK_THROWS_AS(export_grid(g, "/nonexistent-dir/grid"), IoError);
}

TEST_CASE("return-map sweep around the predicted window") {
  SweepSpec s;
  s.return_map = ReturnMapConfig::benchmark(8, 8);
  s.seed_rule = SeedRule::FixedSeed;
  s.seed = 0.0;
  const RescaleFrame f = rescale_frame(*s.return_map);
  // Stable fixed points of the limit map live near M1 in (0, 1), M2 in (-0.4, 0.6).
  const auto lo = f.mu_from_M(-0.5, -1.0);
  const auto hi = f.mu_from_M(1.5, 1.5);
  s.i_min = lo[0];
  s.i_max = hi[0];
  s.j_min = lo[1];
  s.j_max = hi[1];
  s.nx = s.ny = 12;
  s.transient = 200;
  s.samples = 200;
  s.max_period = 4;
  const SweepGrid g = plane_sweep(s, 4);
  int period1 = 0, escaped = 0;
  for (const CellOutcome& c : g.cells) {
    period1 += c.kind == Outcome::Period && c.period == 1;
    escaped += c.kind == Outcome::Escaped;
  }
  CHECK(period1 > 0);
  CHECK(escaped > 0);
  CHECK(plane_sweep(s, 1).cells == g.cells);
  // A period-1 cell has a fixed point of the two-dimensional map with both eigenvalues inside
  // the unit circle.
  const ReducedReturnMap rm(*s.return_map);
  const ReturnMapConfig& rc = *s.return_map;
  auto attracting = [&](double M1, double M2, double Y) {
    double X = 0.0;
    for (int it = 0; it < 500; ++it) X = rescaled_return(rc, f, {X, 0.0}, Y, M1, M2).X[0];
    const auto dx = rescaled_step<Taylor<1>>(rc, f, {Taylor<1>::variable(X), Taylor<1>(0.0)},
                                             Taylor<1>(Y), M1, M2);
    const auto dy = rescaled_step<Taylor<1>>(rc, f, {Taylor<1>(X), Taylor<1>(0.0)},
                                             Taylor<1>::variable(Y), M1, M2);
    const double a = dx.X[0].c[1], b = dy.X[0].c[1], c = dx.Y.c[1], d = dy.Y.c[1];
    const double tr = a + d, det = a * d - b * c;
    // Jury conditions for a 2x2 real matrix.
    return std::abs(det) < 1.0 && std::abs(tr) < 1.0 + det;
  };
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      if (!(g.at(i, j).kind == Outcome::Period && g.at(i, j).period == 1)) continue;
      const auto M = f.M_from_mu(s.param_i(i), s.param_j(j));
      bool found = false;
      for (double y0 : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        try {
          const PeriodicOrbit o = find_periodic_orbit(rm, {M[0], M[1]}, 1, y0);
          found = found || attracting(M[0], M[1], o.Y);
        } catch (const Error&) {
        }
      }
      CHECK(found);
    }
  }
}

}  // TEST_SUITE
