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
#include <functional>
#include <string>
#include <vector>

#include "asymflow/asymfun.hpp"
#include "asymflow/diffeo.hpp"
#include "asymflow/dynamics.hpp"
#include "asymflow/errors.hpp"
#include "asymflow/fd.hpp"
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

AsymFunction zero_fn(const Grid& g, const SpaceMeta& meta) {
  return af_zero(g, meta);
}

double sup_diff(const AsymFunction& a, const AsymFunction& b) {
  const std::vector<double> ta = af_total_samples(a);
  const std::vector<double> tb = af_total_samples(b);
  REQUIRE(ta.size() == tb.size());
  double sup = 0.0;
  for (size_t i = 0; i < ta.size(); ++i) sup = std::max(sup, std::fabs(ta[i] - tb[i]));
  return sup;
}

// Composite Simpson over the grid (odd node count = even interval count).
double simpson(const std::vector<double>& f, double h) {
  REQUIRE(f.size() % 2 == 1);
  double acc = f.front() + f.back();
  for (size_t i = 1; i + 1 < f.size(); ++i) acc += f[i] * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

double ch_energy(const AsymFunction& u) {
  const std::vector<double> tot = af_total_samples(u);
  const std::vector<double> du = [&] {
    std::vector<double> d = fd_derivative(u.rem.samples, u.rem.grid.spacing);
    const TailExpansion dt = u.tail.derivative();
    for (int i = 0; i < u.rem.grid.size; ++i) d[i] += dt.eval(u.rem.grid.x(i));
    return d;
  }();
  std::vector<double> integrand(tot.size());
  for (size_t i = 0; i < tot.size(); ++i) {
    integrand[i] = tot[i] * tot[i] + du[i] * du[i];
  }
  return simpson(integrand, u.rem.grid.spacing);
}

// Mollified peakon: Gaussian(0, sigma^2) convolved with c*e^{-|x|}, closed
// form via the normal CDF. Decays exponentially on both sides.
double smoothed_peakon_value(double x, double c, double sigma) {
  auto ncdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  const double pre = c * std::exp(sigma * sigma / 2.0);
  const double left = std::exp(-x) * ncdf((x - sigma * sigma) / sigma);
  const double right = std::exp(x) * ncdf((-x - sigma * sigma) / sigma);
  return pre * (left + right);
}

}  // namespace

TEST_CASE("beta_b: preconditions, trivial zeros, and meta bookkeeping") {
  const Grid g = Grid::make(15.0, 0.02);

  SUBCASE("regularity below 3 is refused") {
    AsymFunction u = zero_fn(g, {Flavor::W, 1, 3, 2});
    CHECK_THROWS_AS(beta_b(u, 2.0), Error);
  }

  SUBCASE("constant H-flavor data is an exact equilibrium") {
    TailExpansion t;
    t.add_term(TermKind::Even, 0, Rational(7, 10));
    AsymFunction u = make_af(
        g, [](double) { return 0.7; }, {Flavor::H, 0, 1, 3}, t);
    for (double b : {2.0, 3.0, 0.5}) {
      AsymFunction w = beta_b(u, b);
      CHECK(w.tail.empty());
      for (double s : w.rem.samples) CHECK(s == 0.0);
    }
  }

  SUBCASE("derivative/product meta algebra, W flavor") {
    AsymFunction u = make_af(
        g, [](double x) { return std::exp(-x * x); }, {Flavor::W, 1, 3, 5});
    AsymFunction w = beta_b(u, 2.0);
    CHECK(w.meta == SpaceMeta{Flavor::W, 3, 5, 3});
  }

  SUBCASE("derivative/product meta algebra, H flavor") {
    AsymFunction u = make_af(
        g, [](double x) { return std::exp(-x * x); }, {Flavor::H, 0, 1, 3});
    AsymFunction w = beta_b(u, 2.0);
    CHECK(w.meta == SpaceMeta{Flavor::H, 1, 1, 1});
  }
}

TEST_CASE("beta_b: Gaussian data against the closed-form differentiation oracle") {
  // -b u u' - (3-b) u' u'' with u = e^{-x^2}:
  //   u'  = -2x e^{-x^2}
  //   u'' = (4x^2 - 2) e^{-x^2}
  const Grid g = Grid::make(15.0, 0.005);
  AsymFunction u = make_af(
      g, [](double x) { return std::exp(-x * x); }, {Flavor::W, 4, 3, 5});

  auto oracle = [](double x, double b) {
    const double e = std::exp(-x * x);
    const double up = -2.0 * x * e;
    const double upp = (4.0 * x * x - 2.0) * e;
    return -b * e * up - (3.0 - b) * up * upp;
  };

  SUBCASE("stationary crest: value vanishes at x = 0") {
    for (double b : {2.0, 3.0, 0.5}) {
      CHECK(std::fabs(af_eval(beta_b(u, b), 0.0)) <= 1e-12);
    }
  }

  SUBCASE("pinned point x = 1, b = 2 (value 8 e^{-2})") {
    AsymFunction w = beta_b(u, 2.0);
    CHECK(af_eval(w, 1.0) == doctest::Approx(8.0 * std::exp(-2.0)).epsilon(1e-8));
    CHECK(af_eval(w, 1.0) == doctest::Approx(oracle(1.0, 2.0)).epsilon(1e-8));
  }

  SUBCASE("sweep across the core, several b") {
    for (double b : {2.0, 3.0, 0.5}) {
      AsymFunction w = beta_b(u, b);
      for (int k = -10; k <= 10; ++k) {
        const double x = 0.3 * k;
        CHECK(std::fabs(af_eval(w, x) - oracle(x, b)) <= 5e-8);
      }
    }
  }
}

TEST_CASE("beta_b: rational-tail data keeps the tail algebra exact") {
  // u = 3/2 <x>^-1: u' = -3/2 x<x>^-3, u'' = 3/2 (2x^2-1) <x>^-5. With zero
  // remainder every term is exact tail algebra, so values match the closed
  // form to rounding.
  const Grid g = Grid::make(15.0, 0.02);
  TailExpansion t;
  t.add_term(TermKind::Even, 1, Rational(3, 2));
  AsymFunction u = make_af(
      g, [](double x) { return 1.5 / bracket(x); }, {Flavor::W, 1, 3, 5}, t);
  for (double s : u.rem.samples) CHECK(std::fabs(s) <= 1e-15);

  auto oracle = [](double x, double b) {
    const double br = bracket(x);
    const double v = 1.5 / br;
    const double vp = -1.5 * x / std::pow(br, 3);
    const double vpp = 1.5 * (2.0 * x * x - 1.0) / std::pow(br, 5);
    return -b * v * vp - (3.0 - b) * vp * vpp;
  };

  for (double b : {3.0, 0.5}) {
    AsymFunction w = beta_b(u, b);
    for (double x : {0.0, -1.3, 2.0, 7.5}) {
      CHECK(std::fabs(af_eval(w, x) - oracle(x, b)) <= 1e-12);
    }
  }
}

TEST_CASE("reconstruct_momentum: constants, narrow bump, and round trip") {
  SUBCASE("u == c maps to m == c exactly") {
    const Grid g = Grid::make(15.0, 0.02);
    TailExpansion t;
    t.add_term(TermKind::Even, 0, Rational(3, 8));
    AsymFunction u = make_af(
        g, [](double) { return 0.375; }, {Flavor::H, 0, 1, 3}, t);
    AsymFunction m = reconstruct_momentum(u);
    CHECK(m.tail.coefficient(TermKind::Even, 0) == Rational(3, 8));
    CHECK(m.tail.term_count() == 1);
    for (double s : m.rem.samples) CHECK(s == 0.0);
  }

  SUBCASE("mollified peakon: momentum is the (doubled) mollifier bump") {
    // Applying 1 - d^2/dx^2 to G_sigma * e^{-|.|} gives exactly 2 G_sigma.
    const Grid g = Grid::make(15.0, 0.01);
    const double sigma = 0.1;
    AsymFunction u = make_af(
        g, [&](double x) { return smoothed_peakon_value(x, 1.0, sigma); },
        {Flavor::W, 4, 3, 5});
    AsymFunction m = reconstruct_momentum(u);
    const double peak = 2.0 / (sigma * std::sqrt(2.0 * M_PI));
    CHECK(af_eval(m, 0.0) == doctest::Approx(peak).epsilon(1e-3));
    CHECK(std::fabs(af_eval(m, 0.5)) <= 1e-3);
    CHECK(std::fabs(af_eval(m, 1.0)) <= 1e-3);
    CHECK(std::fabs(af_eval(m, -0.5)) <= 1e-3);
  }

  SUBCASE("lambda_inverse undoes reconstruct_momentum to 1e-7") {
    const Grid g = Grid::make(15.0, 0.01);
    AsymFunction u = make_af(
        g, [](double x) { return 0.8 * std::exp(-x * x); }, {Flavor::W, 4, 3, 5});
    AsymFunction back = lambda_inverse(reconstruct_momentum(u));
    CHECK(sup_diff(back, u) <= 1e-7);
  }
}

TEST_CASE("vector_field: zero and constant states are exact equilibria") {
  const Grid g = Grid::make(15.0, 0.02);

  SUBCASE("v == 0 gives (0, 0) bitwise on both paths") {
    SolverConfig cfg;
    cfg.half_width = g.half_width;
    cfg.spacing = g.spacing;
    AsymFunction u0 = zero_fn(g, {Flavor::W, 1, 3, 3});
    SolverState s = initial_state(u0, 2.0);
    for (SolverPath p : {SolverPath::kInvertAndScan, SolverPath::kConjugated}) {
      cfg.path = p;
      VectorFieldResult f = vector_field(s, cfg);
      CHECK(f.dphi.tail.empty());
      CHECK(f.dv.tail.empty());
      for (double x : f.dphi.rem.samples) CHECK(x == 0.0);
      for (double x : f.dv.rem.samples) CHECK(x == 0.0);
    }
  }

  SUBCASE("v == c (H flavor) gives dv = 0 bitwise, dphi = c") {
    SolverConfig cfg;
    cfg.half_width = g.half_width;
    cfg.spacing = g.spacing;
    TailExpansion t;
    t.add_term(TermKind::Even, 0, Rational(1, 4));
    AsymFunction u0 = make_af(
        g, [](double) { return 0.25; }, {Flavor::H, 0, 1, 3}, t);
    SolverState s = initial_state(u0, 3.0);
    for (SolverPath p : {SolverPath::kInvertAndScan, SolverPath::kConjugated}) {
      cfg.path = p;
      VectorFieldResult f = vector_field(s, cfg);
      CHECK(f.dv.tail.empty());
      for (double x : f.dv.rem.samples) CHECK(x == 0.0);
      const std::vector<double> dphi = af_total_samples(f.dphi);
      for (double x : dphi) CHECK(x == 0.25);
    }
  }
}

TEST_CASE("vector_field: invert+scan and conjugated paths agree on smooth states") {
  const Grid g = Grid::make(15.0, 0.01);
  SolverConfig cfg;
  cfg.half_width = g.half_width;
  cfg.spacing = g.spacing;

  // sech^2 velocity, diffeomorphism displaced off the identity.
  AsymFunction v = make_af(
      g,
      [](double x) {
        const double c = std::cosh(x);
        return 0.4 / (c * c);
      },
      {Flavor::W, 4, 3, 5});
  TailExpansion pt;
  pt.add_term(TermKind::Even, 1, Rational(1, 5));
  AsymFunction pu = make_af(
      g, [](double x) { return 0.2 / bracket(x) + 0.1 * std::exp(-0.5 * x * x); },
      {Flavor::W, 1, 3, 5}, pt);
  SolverState s = initial_state(v, 2.0);
  s.phi = dif_validate(pu);
  s.v = v;

  for (double b : {2.0, 3.0}) {
    s.b = b;
    cfg.path = SolverPath::kInvertAndScan;
    VectorFieldResult fa = vector_field(s, cfg);
    cfg.path = SolverPath::kConjugated;
    VectorFieldResult fb = vector_field(s, cfg);
    CHECK(sup_diff(fa.dphi, fb.dphi) == 0.0);
    CHECK(sup_diff(fa.dv, fb.dv) <= 1e-4);
  }
}

TEST_CASE("vector_field: conjugated-path defect shrinks with the grid") {
  // The tridiagonal cross-check is the second-order half of the pair; halving
  // h should cut the inter-path gap by about 4.
  SolverConfig cfg;
  double gaps[2];
  int k = 0;
  for (double h : {0.02, 0.01}) {
    const Grid g = Grid::make(15.0, h);
    cfg.half_width = g.half_width;
    cfg.spacing = h;
    AsymFunction v = make_af(
        g,
        [](double x) {
          const double c = std::cosh(x);
          return 0.4 / (c * c);
        },
        {Flavor::W, 4, 3, 5});
    SolverState s = initial_state(v, 2.0);
    TailExpansion pt;
    pt.add_term(TermKind::Even, 1, Rational(1, 5));
    AsymFunction pu = make_af(
        g, [](double x) { return 0.2 / bracket(x); }, {Flavor::W, 1, 3, 5}, pt);
    s.phi = dif_validate(pu);
    cfg.path = SolverPath::kInvertAndScan;
    VectorFieldResult fa = vector_field(s, cfg);
    cfg.path = SolverPath::kConjugated;
    VectorFieldResult fb = vector_field(s, cfg);
    gaps[k++] = sup_diff(fa.dv, fb.dv);
  }
  CHECK(gaps[1] <= gaps[0] / 2.5);
}

TEST_CASE("step: constants are machine-precision fixed points") {
  const Grid g = Grid::make(15.0, 0.05);
  SolverConfig cfg;
  cfg.half_width = g.half_width;
  cfg.spacing = g.spacing;
  cfg.dt = 0.1;

  SUBCASE("zero data stays zero bitwise, identity flow") {
    SolverState s = initial_state(zero_fn(g, {Flavor::W, 1, 3, 3}), 2.0);
    SolverState s1 = step(s, 0.1, cfg);
    CHECK(s1.t == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(s1.v.tail.empty());
    for (double x : s1.v.rem.samples) CHECK(x == 0.0);
    for (double x : af_total_samples(s1.phi.u)) CHECK(x == 0.0);
    CHECK(s1.phi.phi_prime_min == 1.0);
  }

  SUBCASE("constant background translates the flow and freezes v") {
    TailExpansion t;
    t.add_term(TermKind::Even, 0, Rational(3, 10));
    AsymFunction u0 = make_af(
        g, [](double) { return 0.3; }, {Flavor::H, 0, 0, 3}, t);
    SolverState s = initial_state(u0, 2.0);
    const Rational c0 = s.v.tail.coefficient(TermKind::Even, 0);
    for (int k = 0; k < 5; ++k) s = step(s, 0.1, cfg);
    CHECK(s.t == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s.v.tail.coefficient(TermKind::Even, 0) == c0);
    CHECK(s.v.tail.term_count() == 1);
    for (double x : s.v.rem.samples) CHECK(x == 0.0);
    // phi = id + c t to rounding accumulated over the RK4 weights.
    for (double x : af_total_samples(s.phi.u)) {
      CHECK(x == doctest::Approx(0.3 * 0.5).epsilon(1e-13));
    }
    CHECK(s.meta == u0.meta);
  }
}

TEST_CASE("run: zero data, snapshot cadence, and step diagnostics") {
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.02;
  cfg.dt = 0.01;
  cfg.T = 0.05;
  cfg.output_every = 2;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  Trajectory traj = run(cfg, zero_fn(g, {Flavor::W, 1, 3, 3}));

  CHECK(traj.completed);
  CHECK(traj.failure.empty());
  CHECK(traj.certified_time == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(traj.steps == 5);
  // Snapshots at t=0, after steps 2 and 4 by cadence, and the final state.
  REQUIRE(traj.snapshots.size() == 4);
  CHECK(traj.snapshots.front().t == 0.0);
  CHECK(traj.snapshots.back().t == doctest::Approx(0.05).epsilon(1e-14));
  for (const Snapshot& sn : traj.snapshots) {
    for (double x : af_total_samples(sn.u)) CHECK(x == 0.0);
  }
  REQUIRE(traj.step_log.size() == 5);
  for (const StepDiag& d : traj.step_log) {
    CHECK(d.phi_prime_min == 1.0);
    CHECK(d.boundary_certificate == 0.0);
  }
}

TEST_CASE("run: uneven final interval is absorbed by shrinking dt") {
  SolverConfig cfg;
  cfg.half_width = 15.0;
  cfg.spacing = 0.05;
  cfg.dt = 0.02;
  cfg.T = 0.05;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  Trajectory traj = run(cfg, zero_fn(g, {Flavor::W, 1, 3, 3}));
  CHECK(traj.steps == 3);  // dt adjusted to T/3
  CHECK(traj.snapshots.back().t == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("run: constant-background coefficients are conserved bitwise") {
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.02;
  cfg.dt = 0.01;
  cfg.T = 0.2;
  cfg.output_every = 5;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);

  // u -> 0.1 at +inf and -0.3 at -inf: even part -0.1, odd part 0.2.
  TailExpansion t;
  t.add_term(TermKind::Even, 0, rational_from_double(-0.1));
  t.add_term(TermKind::Odd, 0, rational_from_double(0.2));
  AsymFunction u0 = make_af(
      g,
      [](double x) {
        return -0.1 + 0.2 * x / bracket(x) + 0.05 * std::exp(-x * x);
      },
      {Flavor::H, 0, 1, 3}, t);

  Trajectory traj = run(cfg, u0);
  REQUIRE(traj.completed);
  REQUIRE(traj.snapshots.size() >= 3);
  for (const Snapshot& sn : traj.snapshots) {
    CHECK(sn.u.tail.coefficient(TermKind::Even, 0) == rational_from_double(-0.1));
    CHECK(sn.u.tail.coefficient(TermKind::Odd, 0) == rational_from_double(0.2));
    CHECK(sn.state.phi.phi_prime_min > 0.5);
  }
}

TEST_CASE("run: W-flavor coefficient conservation, internal and fitted") {
  // The fitted check needs a wide domain: the evolving content at orders
  // 2n+1 and above projects onto the conserved columns with weight that
  // falls off like powers of 2/L over the fit window, so the drift floor
  // is set by L and by the size of the tail coefficients.
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 120.0;
  cfg.spacing = 0.02;
  cfg.dt = 2e-3;
  cfg.T = 0.2;
  cfg.output_every = 25;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);

  TailExpansion t;
  t.add_term(TermKind::Even, 1, Rational(1, 4));
  t.add_term(TermKind::Odd, 1, Rational(1, 16));
  t.add_term(TermKind::Even, 2, Rational(-1, 8));
  t.add_term(TermKind::Odd, 2, Rational(3, 32));
  t.add_term(TermKind::Even, 3, Rational(1, 20));
  AsymFunction u0 = make_af(
      g,
      [&](double x) { return t.eval(x) + 0.1 * std::exp(-x * x); },
      {Flavor::W, 1, 3, 3}, t);

  Trajectory traj = run(cfg, u0);
  REQUIRE(traj.completed);
  REQUIRE(traj.snapshots.size() >= 3);

  // (i) internal bookkeeping: orders <= min(2n, N) = 2 never change.
  for (const Snapshot& sn : traj.snapshots) {
    CHECK(sn.u.tail.coefficient(TermKind::Even, 1) == Rational(1, 4));
    CHECK(sn.u.tail.coefficient(TermKind::Odd, 1) == Rational(1, 16));
    CHECK(sn.u.tail.coefficient(TermKind::Even, 2) == Rational(-1, 8));
    CHECK(sn.u.tail.coefficient(TermKind::Odd, 2) == Rational(3, 32));
  }

  // (ii) independent of the bookkeeping: fit raw Eulerian samples. The basis
  // reaches two orders past N so that the evolving demoted content gets its
  // own columns instead of leaking into the conserved ones.
  std::vector<TailFit> fits;
  for (const Snapshot& sn : traj.snapshots) {
    fits.push_back(af_extract_coeffs_fit(af_total_samples(sn.u), g, 1, 5));
  }
  CHECK(fits.front().even_coeffs[0] == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(fits.front().odd_coeffs[0] == doctest::Approx(0.0625).epsilon(1e-3));
  double drift3 = 0.0;
  for (const TailFit& f : fits) {
    CHECK(std::fabs(f.even_coeffs[0] - fits.front().even_coeffs[0]) <= 1e-6);
    CHECK(std::fabs(f.odd_coeffs[0] - fits.front().odd_coeffs[0]) <= 1e-6);
    CHECK(std::fabs(f.even_coeffs[1] - fits.front().even_coeffs[1]) <= 1e-6);
    CHECK(std::fabs(f.odd_coeffs[1] - fits.front().odd_coeffs[1]) <= 1e-6);
    drift3 = std::max(drift3, std::fabs(f.even_coeffs[2] - fits.front().even_coeffs[2]));
  }
  // Order 2n+1 = 3 is past the conserved range and genuinely moves.
  CHECK(drift3 > 1e-4);
}

TEST_CASE("run: scaling invariance 2u(t; u0) = u(t/2; 2u0)") {
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.01;
  cfg.dt = 1e-3;
  cfg.T = 0.1;
  cfg.output_every = 1000;
  cfg.path = SolverPath::kConjugated;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);

  auto gaussian = [](double a) {
    return [a](double x) { return a * std::exp(-x * x); };
  };
  AsymFunction u0 = make_af(g, gaussian(0.3), {Flavor::W, 4, 3, 5});
  AsymFunction u0x2 = make_af(g, gaussian(0.6), {Flavor::W, 4, 3, 5});

  Trajectory slow = run(cfg, u0);
  cfg.T = 0.05;
  Trajectory fast = run(cfg, u0x2);
  REQUIRE(slow.completed);
  REQUIRE(fast.completed);

  const std::vector<double> a = af_total_samples(slow.snapshots.back().u);
  const std::vector<double> b = af_total_samples(fast.snapshots.back().u);
  double sup = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sup = std::max(sup, std::fabs(2.0 * a[i] - b[i]));
  }
  CHECK(sup <= 1e-6);
}

TEST_CASE("run: CH energy is conserved on decaying data (b = 2)") {
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.02;
  cfg.dt = 2e-3;
  cfg.T = 0.2;
  cfg.output_every = 25;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  AsymFunction u0 = make_af(
      g, [](double x) { return 0.5 * std::exp(-x * x); }, {Flavor::W, 4, 3, 5});

  Trajectory traj = run(cfg, u0);
  REQUIRE(traj.completed);
  const double e0 = ch_energy(traj.snapshots.front().u);
  REQUIRE(e0 > 0.1);
  for (const Snapshot& sn : traj.snapshots) {
    CHECK(std::fabs(ch_energy(sn.u) - e0) / e0 <= 1e-6);
  }
}

TEST_CASE("run: temporal self-convergence is fourth order") {
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.05;
  cfg.T = 0.2;
  cfg.output_every = 1 << 20;
  cfg.path = SolverPath::kConjugated;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  AsymFunction u0 = make_af(
      g, [](double x) { return 0.4 * std::exp(-x * x); }, {Flavor::W, 4, 3, 5});

  std::vector<std::vector<double>> finals;
  for (double dt : {0.02, 0.01, 0.005}) {
    cfg.dt = dt;
    Trajectory traj = run(cfg, u0);
    REQUIRE(traj.completed);
    finals.push_back(af_total_samples(traj.snapshots.back().u));
  }
  auto sup = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s = std::max(s, std::fabs(a[i] - b[i]));
    return s;
  };
  const double e1 = sup(finals[0], finals[1]);
  const double e2 = sup(finals[1], finals[2]);
  REQUIRE(e2 > 0.0);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 3.5);
  CHECK(order <= 4.6);
}

TEST_CASE("run: flow map stays consistent with the Eulerian field in time") {
  // d(phi)/dt = u(t) o phi, checked with a centered 4th-order stencil on
  // per-step snapshots.
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.02;
  cfg.dt = 0.01;
  cfg.T = 0.05;
  cfg.output_every = 1;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  AsymFunction u0 = make_af(
      g, [](double x) { return 0.4 * std::exp(-x * x); }, {Flavor::W, 4, 3, 5});

  Trajectory traj = run(cfg, u0);
  REQUIRE(traj.completed);
  REQUIRE(traj.snapshots.size() == 6);

  const int mid = 2;  // t = 0.02, uses snapshots 0..4
  const double dt = cfg.dt;
  std::vector<double> ddt(g.size);
  const std::vector<double> pm2 = af_total_samples(traj.snapshots[mid - 2].state.phi.u);
  const std::vector<double> pm1 = af_total_samples(traj.snapshots[mid - 1].state.phi.u);
  const std::vector<double> pp1 = af_total_samples(traj.snapshots[mid + 1].state.phi.u);
  const std::vector<double> pp2 = af_total_samples(traj.snapshots[mid + 2].state.phi.u);
  for (int i = 0; i < g.size; ++i) {
    ddt[i] = (-pp2[i] + 8.0 * pp1[i] - 8.0 * pm1[i] + pm2[i]) / (12.0 * dt);
  }
  const Snapshot& sn = traj.snapshots[mid];
  const std::vector<double> rhs =
      af_total_samples(dif_compose_fn(sn.u, sn.state.phi));
  double sup = 0.0;
  for (int i = 0; i < g.size; ++i) sup = std::max(sup, std::fabs(ddt[i] - rhs[i]));
  CHECK(sup <= 1e-6);
}

TEST_CASE("run: steep data loses the diffeomorphism certificate gracefully") {
  SolverConfig cfg;
  cfg.b = 2.0;
  cfg.half_width = 15.0;
  cfg.spacing = 0.05;
  cfg.dt = 0.02;
  cfg.T = 2.5;
  cfg.output_every = 25;
  cfg.margin = 1e-4;
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  AsymFunction u0 = make_af(
      g, [](double x) { return -1.2 * x * std::exp(-x * x); }, {Flavor::W, 4, 3, 5});

  Trajectory traj = run(cfg, u0);
  CHECK_FALSE(traj.completed);
  CHECK_FALSE(traj.failure.empty());
  CHECK(traj.certified_time > 0.0);
  CHECK(traj.certified_time < cfg.T);
  REQUIRE_FALSE(traj.snapshots.empty());
  CHECK(traj.snapshots.back().t <= traj.certified_time + 1e-12);
  for (const Snapshot& sn : traj.snapshots) {
    for (double x : af_total_samples(sn.u)) CHECK(std::isfinite(x));
    for (double x : af_total_samples(sn.state.v)) CHECK(std::isfinite(x));
  }
}

TEST_CASE("run and initial_state: configuration gating") {
  const Grid g = Grid::make(15.0, 0.02);
  SolverConfig cfg;
  cfg.half_width = 15.0;
  cfg.spacing = 0.02;
  AsymFunction u0 = make_af(
      g, [](double x) { return 0.4 * std::exp(-x * x); }, {Flavor::W, 4, 3, 5});

  SUBCASE("nonpositive dt or T") {
    cfg.dt = 0.0;
    CHECK_THROWS_AS(run(cfg, u0), ConfigError);
    cfg.dt = 1e-3;
    cfg.T = -1.0;
    CHECK_THROWS_AS(run(cfg, u0), ConfigError);
  }

  SUBCASE("advective stability guard names itself in the message") {
    AsymFunction big = make_af(
        g, [](double x) { return 3.0 * std::exp(-x * x); }, {Flavor::W, 4, 3, 5});
    cfg.dt = 0.02;
    cfg.T = 0.1;
    try {
      run(cfg, big);
      FAIL("expected a ConfigError from the stability guard");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("stability") != std::string::npos);
    }
  }

  SUBCASE("W flavor requires a decaying leading tail index") {
    TailExpansion t;
    t.add_term(TermKind::Even, 0, Rational(1, 2));
    AsymFunction bad = make_af(
        g, [](double x) { return 0.5 + 0.1 * std::exp(-x * x); },
        {Flavor::W, 0, 1, 3}, t);
    CHECK_THROWS_AS(initial_state(bad, 2.0), ConfigError);
  }

  SUBCASE("regularity below 3 is rejected at state construction") {
    AsymFunction low = zero_fn(g, {Flavor::W, 1, 3, 2});
    CHECK_THROWS_AS(initial_state(low, 2.0), ConfigError);
  }

  SUBCASE("grid mismatch between config and data") {
    cfg.spacing = 0.01;
    cfg.dt = 1e-3;
    cfg.T = 0.01;
    CHECK_THROWS_AS(run(cfg, u0), GridMismatchError);
  }
}

}  // namespace asymflow
