// Copyright 2026 The asymflow authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "asymflow/asymfun.hpp"
#include "asymflow/diagnostics.hpp"
#include "asymflow/dynamics.hpp"
#include "asymflow/errors.hpp"
#include "asymflow/grid.hpp"
#include "asymflow/helmholtz.hpp"
#include "asymflow/rational.hpp"
#include "asymflow/tail.hpp"
#include "doctest.h"

namespace asymflow {
namespace {

AsymFunction make_af(const Grid& g, const std::function<double(double)>& f,
                     const SpaceMeta& meta, TailExpansion tail = {}) {
  std::vector<double> samples(g.size);
  for (int i = 0; i < g.size; ++i) {
    samples[i] = f(g.x(i)) - tail.eval(g.x(i));
  }
  return af_from_parts(std::move(tail), std::move(samples), g, meta);
}

// Mollified peaked traveling profile: (G_sigma * c e^{-|.|})(x), closed form.
double smoothed_peakon_value(double x, double c, double sigma) {
  auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  const double s2 = sigma * sigma;
  return c * std::exp(0.5 * s2) *
         (std::exp(-x) * Phi((x - s2) / sigma) + std::exp(x) * Phi((-x - s2) / sigma));
}

}  // namespace

// ---------------------------------------------------------------------------
// oracle_q
// ---------------------------------------------------------------------------

TEST_CASE("oracle_q: constants integrate the kernel to exactly one") {
  auto one = [](double) { return 1.0; };
  for (double x : {0.0, -3.7, 12.0}) {
    CHECK(std::fabs(oracle_q_plus(one, x) - 1.0) <= 1e-13);
    CHECK(std::fabs(oracle_q_minus(one, x) - 1.0) <= 1e-13);
  }
}

TEST_CASE("oracle_q: Gaussian at the origin matches the closed form") {
  auto gauss = [](double y) { return std::exp(-y * y); };
  // int_0^inf e^{-z^2 - z} dz = e^{1/4} (sqrt(pi)/2) erfc(1/2)
  const double exact =
      std::exp(0.25) * 0.5 * std::sqrt(M_PI) * std::erfc(0.5);
  CHECK(std::fabs(oracle_q_plus(gauss, 0.0) - exact) <= 1e-12);
  // Even input: both transforms coincide at the origin.
  CHECK(std::fabs(oracle_q_minus(gauss, 0.0) - exact) <= 1e-12);
}

TEST_CASE("oracle_q: exponential profile has a rational value at the origin") {
  auto expabs = [](double y) { return std::exp(-std::fabs(y)); };
  // int_0^inf e^{-2z} dz = 1/2
  CHECK(std::fabs(oracle_q_plus(expabs, 0.0) - 0.5) <= 1e-12);
  CHECK(std::fabs(oracle_q_minus(expabs, 0.0) - 0.5) <= 1e-12);
}

TEST_CASE("oracle_q: golden regression value stays frozen") {
  const std::string path =
      std::string(ASYMFLOW_TEST_DATA_DIR) + "/q_plus_gaussian.txt";
  auto gauss = [](double y) { return std::exp(-y * y); };
  const double val = oracle_q_plus(gauss, 0.0);
  if (std::getenv("ASYMFLOW_GOLDEN_REGEN") != nullptr) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out.precision(17);
    out << val << "\n";
  }
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(),
                  "golden file missing; run once with ASYMFLOW_GOLDEN_REGEN=1");
  double frozen = 0.0;
  in >> frozen;
  CHECK(std::fabs(val - frozen) <= 1e-12);
}

TEST_CASE("oracle_q: scan transforms agree at 20 random nodes to 1e-10") {
  const Grid g = Grid::make(20.0, 0.01);
  auto fn = [](double x) {
    return 0.7 * std::exp(-0.5 * x * x) + 0.3 * std::exp(-0.25 * (x - 1.0) * (x - 1.0));
  };
  std::vector<double> samples(g.size);
  for (int i = 0; i < g.size; ++i) samples[i] = fn(g.x(i));
  const Remainder r{g, 0, samples};
  const Remainder qp = q_plus(r);
  const Remainder qm = q_minus(r);

  std::mt19937_64 rng(20260814);
  std::uniform_int_distribution<int> pick(g.interval_below(-8.0), g.interval_below(8.0));
  for (int trial = 0; trial < 20; ++trial) {
    const int i = pick(rng);
    const double x = g.x(i);
    CHECK(std::fabs(qp.samples[i] - oracle_q_plus(fn, x)) <= 1e-10);
    CHECK(std::fabs(qm.samples[i] - oracle_q_minus(fn, x)) <= 1e-10);
  }
}

// ---------------------------------------------------------------------------
// track_coefficients / track_energy / track_crest
// ---------------------------------------------------------------------------

TEST_CASE("track: zero solution gives identically zero series") {
  SolverConfig cfg;
  cfg.half_width = 15.0;
  cfg.spacing = 0.05;
  cfg.dt = 0.01;
  cfg.T = 0.03;
  cfg.output_every = 1;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  Trajectory traj = run(cfg, af_zero(g, {Flavor::W, 1, 3, 3}));
  REQUIRE(traj.completed);
  REQUIRE(traj.snapshots.size() == 4);

  const std::vector<CoeffRow> rows = track_coefficients(traj);
  REQUIRE(rows.size() == 4);
  for (const CoeffRow& row : rows) {
    REQUIRE(row.internal_even.size() == 3);  // orders 1..3
    CHECK(row.fit_ok);
    for (int k = 0; k < 3; ++k) {
      CHECK(row.internal_even[k] == 0.0);
      CHECK(row.internal_odd[k] == 0.0);
      CHECK(std::fabs(row.fitted_even[k]) <= 1e-12);
      CHECK(std::fabs(row.fitted_odd[k]) <= 1e-12);
    }
  }
  for (double e : track_energy(traj, cfg.b)) CHECK(e == 0.0);
}

TEST_CASE("track: H-flavor constant solution has fitted one-sided limits equal to c") {
  const double c = 0.35;
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.05;
  cfg.dt = 0.01;
  cfg.T = 0.05;
  cfg.output_every = 2;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  TailExpansion t;
  t.add_term(TermKind::Even, 0, rational_from_double(c));
  AsymFunction u0 = make_af(g, [&](double) { return c; }, {Flavor::H, 0, 1, 3}, t);

  Trajectory traj = run(cfg, u0);
  REQUIRE(traj.completed);
  const std::vector<CoeffRow> rows = track_coefficients(traj);
  REQUIRE(rows.size() >= 3);
  for (const CoeffRow& row : rows) {
    REQUIRE(row.fit_ok);
    // c0+- = fitted a0 +- fitted b0
    const double c_plus = row.fitted_even[0] + row.fitted_odd[0];
    const double c_minus = row.fitted_even[0] - row.fitted_odd[0];
    CHECK(std::fabs(c_plus - c) <= 1e-9);
    CHECK(std::fabs(c_minus - c) <= 1e-9);
  }
}

TEST_CASE("track: windowed energy matches a direct Simpson oracle at t = 0") {
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.02;
  cfg.dt = 0.01;
  cfg.T = 0.02;
  cfg.output_every = 1;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  AsymFunction u0 =
      make_af(g, [](double x) { return 0.5 * std::exp(-x * x); }, {Flavor::W, 4, 3, 5});
  Trajectory traj = run(cfg, u0);
  REQUIRE(traj.completed);

  // E = int u^2 + (u')^2 with u = a e^{-x^2}: a^2 sqrt(pi/2) (1 + 1) = ...
  // u'^2 = 4x^2 u^2; int e^{-2x^2} = sqrt(pi/2); int 4x^2 e^{-2x^2} = sqrt(pi/2).
  const double a = 0.5;
  const double exact = a * a * std::sqrt(M_PI / 2.0) * 2.0;
  const std::vector<double> e = track_energy(traj, cfg.b);
  REQUIRE(e.size() == traj.snapshots.size());
  CHECK(std::fabs(e.front() - exact) <= 1e-7);
  // invariant along the short b = 2 run
  for (double ei : e) CHECK(std::fabs(ei - e.front()) <= 5e-7);
}

TEST_CASE("track: crest location is refined below the grid spacing") {
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.05;
  cfg.dt = 0.01;
  cfg.T = 0.01;
  cfg.output_every = 1;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  const double x_star = 0.37;  // off-grid peak (nodes sit at 0.35 and 0.40)
  AsymFunction u0 = make_af(
      g, [&](double x) { return std::exp(-2.0 * (x - x_star) * (x - x_star)); },
      {Flavor::W, 4, 3, 5});
  Trajectory traj = run(cfg, u0);
  REQUIRE(traj.completed);

  const std::vector<CrestRow> crest = track_crest(traj);
  REQUIRE(crest.size() == traj.snapshots.size());
  CHECK(std::fabs(crest.front().x - x_star) <= 1e-3);
  CHECK(crest.front().height == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("track: smoothed-peakon crest travels at speed c within 5 percent") {
  const double c = 1.0;
  const double sigma = 0.1;
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.01;
  cfg.dt = 5e-3;
  cfg.T = 1.0;
  cfg.output_every = 20;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  AsymFunction u0 = make_af(
      g, [&](double x) { return smoothed_peakon_value(x, c, sigma); },
      {Flavor::W, 4, 3, 5});

  Trajectory traj = run(cfg, u0);
  REQUIRE(traj.completed);
  const std::vector<CrestRow> crest = track_crest(traj);
  std::vector<double> ts, xs;
  for (size_t i = 0; i < crest.size(); ++i) {
    ts.push_back(traj.snapshots[i].t);
    xs.push_back(crest[i].x);
  }
  const double speed = least_squares_slope(ts, xs);
  CHECK(std::fabs(speed - c) <= 0.05 * c);
}

TEST_CASE("track: hopeless fit range is flagged per snapshot, not thrown") {
  SolverConfig cfg;
  cfg.half_width = 15.0;
  cfg.spacing = 0.05;
  cfg.dt = 0.01;
  cfg.T = 0.02;
  cfg.output_every = 1;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  AsymFunction u0 =
      make_af(g, [](double x) { return 0.3 * std::exp(-x * x); }, {Flavor::W, 4, 3, 5});
  Trajectory traj = run(cfg, u0);
  REQUIRE(traj.completed);

  const std::vector<CoeffRow> rows = track_coefficients(traj, 0, 12, 2);
  REQUIRE(!rows.empty());
  for (const CoeffRow& row : rows) {
    CHECK(!row.fit_ok);
    for (double v : row.fitted_even) CHECK(std::isnan(v));
    for (double v : row.fitted_odd) CHECK(std::isnan(v));
  }
}

// ---------------------------------------------------------------------------
// CSV export
// ---------------------------------------------------------------------------

TEST_CASE("csv: pinned column layout and zero rows for the zero solution") {
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.05;
  cfg.dt = 0.01;
  cfg.T = 0.02;
  cfg.output_every = 1;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  Trajectory traj = run(cfg, af_zero(g, {Flavor::W, 1, 3, 3}));
  REQUIRE(traj.completed);

  const DiagnosticsTable table = diagnose(traj);
  std::ostringstream os;
  write_diagnostics_csv(os, table);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header ==
        "t,a_1,a_2,a_3,b_1,b_2,b_3,fitted_a_1,fitted_a_2,fitted_a_3,"
        "fitted_b_1,fitted_b_2,fitted_b_3,energy,crest_x,phi_prime_min");
  int data_lines = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) ++data_lines;
  }
  CHECK(data_lines == static_cast<int>(traj.snapshots.size()));
  // Zero solution: a zero internal coefficient must print as exactly 0.
  CHECK(os.str().find(",0,") != std::string::npos);
}

TEST_CASE("csv: energy column is blank off b = 2 and crest tracks the peak") {
  SolverConfig cfg;
  cfg.b = 3.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.05;
  cfg.dt = 0.01;
  cfg.T = 0.02;
  cfg.output_every = 1;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  AsymFunction u0 =
      make_af(g, [](double x) { return 0.3 * std::exp(-x * x); }, {Flavor::W, 4, 3, 5});
  Trajectory traj = run(cfg, u0);
  REQUIRE(traj.completed);

  const DiagnosticsTable table = diagnose(traj);
  REQUIRE(!table.energy.empty());
  for (double e : table.energy) CHECK(std::isnan(e));
  std::ostringstream os;
  write_diagnostics_csv(os, table);
  CHECK(os.str().find("nan") != std::string::npos);
  CHECK(std::fabs(table.crest.front().x) <= 1e-6);
}

// ---------------------------------------------------------------------------
// convergence_harness
// ---------------------------------------------------------------------------

TEST_CASE("convergence: constant translation flow is exact on every level") {
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.1;
  cfg.dt = 0.02;
  cfg.T = 0.2;
  const double c = 0.3;
  auto make_u0 = [&](const Grid& g) {
    TailExpansion t;
    t.add_term(TermKind::Even, 0, rational_from_double(c));
    return make_af(g, [&](double) { return c; }, {Flavor::H, 0, 1, 3}, t);
  };

  const ConvergenceReport rep = convergence_harness(cfg, make_u0, 3);
  REQUIRE(rep.temporal.errors.size() == 2);
  REQUIRE(rep.spatial.errors.size() == 2);
  for (double e : rep.temporal.errors) CHECK(e <= 1e-13);
  for (double e : rep.spatial.errors) CHECK(e <= 1e-13);
  for (double o : rep.temporal.orders) CHECK(std::isnan(o));
  for (double o : rep.spatial.orders) CHECK(std::isnan(o));
}

TEST_CASE("convergence: smooth rational-tail data shows RK4 temporal order") {
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.1;
  cfg.dt = 0.04;
  cfg.T = 0.2;
  // The conjugated route's stage map is smooth in the state, so the dt-ladder
  // exposes the integrator's own order. The default route re-grids through
  // interpolation inside the stage map; its cell-boundary kinks cap temporal
  // self-convergence at an absolute scale ~h below the spatial error, which a
  // fixed-grid dt-ladder would resolve instead of the integrator.
  cfg.path = SolverPath::kConjugated;
  auto make_u0 = [&](const Grid& g) {
    TailExpansion t;
    t.add_term(TermKind::Even, 1, Rational(1, 4));
    t.add_term(TermKind::Odd, 2, Rational(1, 10));
    t.add_term(TermKind::Even, 3, Rational(1, 20));
    return make_af(
        g, [&](double x) { return t.eval(x) + 0.3 * std::exp(-x * x); },
        {Flavor::W, 1, 3, 3}, t);
  };

  const ConvergenceReport rep = convergence_harness(cfg, make_u0, 3);
  REQUIRE(rep.temporal.orders.size() == 1);
  CHECK(rep.temporal.orders[0] >= 3.5);
  CHECK(rep.temporal.orders[0] <= 4.6);
}

TEST_CASE("convergence: interpolation plus finite-difference stack spatial order") {
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.2;
  cfg.dt = 2e-3;
  cfg.T = 0.1;
  auto make_u0 = [](const Grid& g) {
    return make_af(g, [](double x) { return 0.4 * std::exp(-x * x); },
                   {Flavor::W, 4, 3, 5});
  };

  const ConvergenceReport rep = convergence_harness(cfg, make_u0, 3);
  REQUIRE(rep.spatial.orders.size() == 1);
  CHECK(rep.spatial.orders[0] >= 3.5);
}

TEST_CASE("convergence: fewer than three levels is a config error") {
  SolverConfig cfg;
  cfg.half_width = 15.0;
  cfg.spacing = 0.1;
  cfg.dt = 0.02;
  cfg.T = 0.1;
  auto make_u0 = [](const Grid& g) { return af_zero(g, {Flavor::W, 1, 3, 3}); };
  CHECK_THROWS_AS(convergence_harness(cfg, make_u0, 2), ConfigError);
}

// ---------------------------------------------------------------------------
// least-squares slope utility
// ---------------------------------------------------------------------------

TEST_CASE("least_squares_slope recovers an exact line") {
  std::vector<double> t{0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> y;
  for (double ti : t) y.push_back(0.7 - 1.3 * ti);
  CHECK(std::fabs(least_squares_slope(t, y) + 1.3) <= 1e-14);
}

}  // namespace asymflow
