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

#include "asymflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "asymflow/errors.hpp"
#include "asymflow/parallel.hpp"
#include "asymflow/rational.hpp"
#include "asymflow/tail.hpp"

namespace asymflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Composite Simpson over an odd node count (guaranteed by Grid::make).
double simpson(const std::vector<double>& f, double h) {
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i + 1 < f.size(); i += 2) odd += f[i];
  for (std::size_t i = 2; i + 1 < f.size(); i += 2) even += f[i];
  return h / 3.0 * (f.front() + f.back() + 4.0 * odd + 2.0 * even);
}

}  // namespace

double oracle_q(const std::function<double(double)>& g, double x, int sign) {
  if (sign != 1 && sign != -1) {
    throw ConfigError("oracle_q: sign must be +1 or -1");
  }
  const double s = static_cast<double>(sign);
  auto integrand = [&](double z) { return g(x - s * z) * std::exp(-z); };
  // The kernel truncation at z = 70 contributes at most sup|g|·e^{-70}, far
  // below the certified 1e-12 for any bounded g.
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, 70.0, 15, 1e-13);
}

double oracle_q_plus(const std::function<double(double)>& g, double x) {
  return oracle_q(g, x, +1);
}

double oracle_q_minus(const std::function<double(double)>& g, double x) {
  return oracle_q(g, x, -1);
}

std::vector<CoeffRow> track_coefficients(const Trajectory& traj, int first,
                                         int last, int guard, int threads) {
  std::vector<CoeffRow> rows(traj.snapshots.size());
  if (traj.snapshots.empty()) return rows;
  const SpaceMeta meta = traj.snapshots.front().u.meta;
  if (first < 0) first = meta.n;
  if (last < 0) last = meta.N;
  if (guard < 0) {
    throw ConfigError("track_coefficients: guard must be nonnegative");
  }
  // A space with no tail terms (n = N + 1) has nothing to track: every row
  // keeps empty columns and the fit is skipped.
  if (last < first) {
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
      rows[i].t = traj.snapshots[i].t;
    }
    return rows;
  }
  const int count = last - first + 1;

  parallel_for(0, static_cast<int>(traj.snapshots.size()), threads,
               [&](int lo, int hi) {
                 for (int i = lo; i < hi; ++i) {
                   const Snapshot& sn = traj.snapshots[i];
                   CoeffRow row;
                   row.t = sn.t;
                   for (int k = first; k <= last; ++k) {
                     row.internal_even.push_back(
                         to_double(sn.u.tail.coefficient(TermKind::Even, k)));
                     row.internal_odd.push_back(
                         to_double(sn.u.tail.coefficient(TermKind::Odd, k)));
                   }
                   try {
                     const TailFit fit = af_extract_coeffs_fit(
                         af_total_samples(sn.u), sn.u.rem.grid, first,
                         last + guard);
                     row.fit_condition = fit.condition_number;
                     row.fitted_even.assign(fit.even_coeffs.begin(),
                                            fit.even_coeffs.begin() + count);
                     row.fitted_odd.assign(fit.odd_coeffs.begin(),
                                           fit.odd_coeffs.begin() + count);
                   } catch (const FitConditioningError& e) {
                     row.fit_ok = false;
                     row.fit_condition = e.condition_number;
                     row.fitted_even.assign(count, kNaN);
                     row.fitted_odd.assign(count, kNaN);
                   }
                   rows[i] = std::move(row);
                 }
               });
  return rows;
}

std::vector<double> track_energy(const Trajectory& traj, double b) {
  std::vector<double> out;
  out.reserve(traj.snapshots.size());
  if (b != 2.0) {
    out.assign(traj.snapshots.size(), kNaN);
    return out;
  }
  for (const Snapshot& sn : traj.snapshots) {
    const std::vector<double> u = af_total_samples(sn.u);
    const std::vector<double> ux = af_total_samples(af_derivative(sn.u));
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      f[i] = u[i] * u[i] + ux[i] * ux[i];
    }
    out.push_back(simpson(f, sn.u.rem.grid.spacing));
  }
  return out;
}

std::vector<CrestRow> track_crest(const Trajectory& traj) {
  std::vector<CrestRow> out;
  out.reserve(traj.snapshots.size());
  for (const Snapshot& sn : traj.snapshots) {
    const std::vector<double> u = af_total_samples(sn.u);
    const Grid& g = sn.u.rem.grid;
    int im = 0;
    for (int i = 1; i < g.size; ++i) {
      if (u[i] > u[im]) im = i;
    }
    CrestRow row{sn.t, g.x(im), u[im]};
    if (im > 0 && im + 1 < g.size) {
      const double fl = u[im - 1];
      const double fc = u[im];
      const double fr = u[im + 1];
      const double denom = fl - 2.0 * fc + fr;
      if (denom != 0.0) {
        const double delta = 0.5 * (fl - fr) / denom;
        // |delta| > 1 means the three nodes do not bracket a parabolic
        // vertex (plateau or noise); keep the node itself then.
        if (std::fabs(delta) <= 1.0) {
          row.x = g.x(im) + delta * g.spacing;
          row.height = fc - 0.25 * (fl - fr) * delta;
        }
      }
    }
    out.push_back(row);
  }
  return out;
}

double least_squares_slope(const std::vector<double>& t,
                           const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 2) {
    throw ConfigError("least_squares_slope: need two or more matching samples");
  }
  const double n = static_cast<double>(t.size());
  double mt = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    num += (t[i] - mt) * (y[i] - my);
    den += (t[i] - mt) * (t[i] - mt);
  }
  if (den == 0.0) {
    throw ConfigError("least_squares_slope: all abscissae coincide");
  }
  return num / den;
}

DiagnosticsTable diagnose(const Trajectory& traj, int threads) {
  DiagnosticsTable table;
  if (traj.snapshots.empty()) return table;
  const SpaceMeta meta = traj.snapshots.front().u.meta;
  table.first_order = meta.n;
  table.last_order = meta.N;
  table.coeffs = track_coefficients(traj, meta.n, meta.N, 2, threads);
  table.energy = track_energy(traj, traj.snapshots.front().state.b);
  table.crest = track_crest(traj);
  table.phi_prime_min.reserve(traj.snapshots.size());
  for (const Snapshot& sn : traj.snapshots) {
    table.phi_prime_min.push_back(sn.state.phi.phi_prime_min);
  }
  return table;
}

void write_diagnostics_csv(std::ostream& os, const DiagnosticsTable& table) {
  os << "t";
  const auto each_order = [&](const std::string& prefix) {
    for (int k = table.first_order; k <= table.last_order; ++k) {
      os << "," << prefix << "_" << k;
    }
  };
  each_order("a");
  each_order("b");
  each_order("fitted_a");
  each_order("fitted_b");
  os << ",energy,crest_x,phi_prime_min\n";

  os << std::setprecision(17);
  for (std::size_t i = 0; i < table.coeffs.size(); ++i) {
    const CoeffRow& row = table.coeffs[i];
    os << row.t;
    for (double v : row.internal_even) os << "," << v;
    for (double v : row.internal_odd) os << "," << v;
    for (double v : row.fitted_even) os << "," << v;
    for (double v : row.fitted_odd) os << "," << v;
    os << "," << table.energy[i] << "," << table.crest[i].x << ","
       << table.phi_prime_min[i] << "\n";
  }
}

namespace {

// Sup difference between a coarse sample vector and a refinement of it whose
// node i·stride coincides with coarse node i.
double sup_diff(const std::vector<double>& coarse,
                const std::vector<double>& fine, int stride) {
  double m = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    m = std::max(m, std::fabs(coarse[i] - fine[i * stride]));
  }
  return m;
}

void fill_orders(Ladder& ladder) {
  constexpr double kNoiseFloor = 1e-13;
  for (std::size_t i = 0; i + 1 < ladder.errors.size(); ++i) {
    if (ladder.errors[i] <= kNoiseFloor || ladder.errors[i + 1] <= kNoiseFloor) {
      ladder.orders.push_back(kNaN);
    } else {
      ladder.orders.push_back(std::log2(ladder.errors[i] / ladder.errors[i + 1]));
    }
  }
}

std::vector<double> final_samples(const SolverConfig& cfg,
                                  const AsymFunction& u0, const char* ladder,
                                  int level) {
  Trajectory traj = run(cfg, u0);
  if (!traj.completed) {
    throw ConvergenceError("convergence_harness: " + std::string(ladder) +
                           " level " + std::to_string(level) +
                           " did not complete: " + traj.failure);
  }
  return af_total_samples(traj.snapshots.back().u);
}

}  // namespace

ConvergenceReport convergence_harness(
    const SolverConfig& config,
    const std::function<AsymFunction(const Grid&)>& make_u0, int levels) {
  if (levels < 3) {
    throw ConfigError(
        "convergence_harness: need at least 3 levels (two consecutive "
        "differences make one observed order)");
  }
  ConvergenceReport rep;

  {  // Temporal ladder: dt halves on the base grid. Both runs of each pair
     // share the grid, so the spatial bias cancels in their difference and
     // the ratio isolates the time integrator's order.
    const Grid g = Grid::make(config.half_width, config.spacing);
    std::vector<std::vector<double>> finals;
    for (int level = 0; level < levels; ++level) {
      SolverConfig cfg = config;
      cfg.dt = config.dt / static_cast<double>(1 << level);
      cfg.output_every = 0;
      rep.temporal.dt.push_back(cfg.dt);
      rep.temporal.spacing.push_back(cfg.spacing);
      finals.push_back(final_samples(cfg, make_u0(g), "temporal", level));
    }
    for (int level = 0; level + 1 < levels; ++level) {
      rep.temporal.errors.push_back(sup_diff(finals[level], finals[level + 1], 1));
    }
    fill_orders(rep.temporal);
  }

  {  // Spatial ladder: h and dt halve together (the fixed dt/h ratio keeps
     // every level inside the advective stability guard), compared on the
     // coarser level's nodes. The time integrator converges at least as fast
     // as the spatial stack, so the joint refinement exposes the spatial
     // order.
    std::vector<std::vector<double>> finals;
    for (int level = 0; level < levels; ++level) {
      SolverConfig cfg = config;
      cfg.spacing = config.spacing / static_cast<double>(1 << level);
      cfg.dt = config.dt / static_cast<double>(1 << level);
      cfg.output_every = 0;
      rep.spatial.dt.push_back(cfg.dt);
      rep.spatial.spacing.push_back(cfg.spacing);
      const Grid g = Grid::make(cfg.half_width, cfg.spacing);
      finals.push_back(final_samples(cfg, make_u0(g), "spatial", level));
    }
    for (int level = 0; level + 1 < levels; ++level) {
      rep.spatial.errors.push_back(sup_diff(finals[level], finals[level + 1], 2));
    }
    fill_orders(rep.spatial);
  }

  return rep;
}

}  // namespace asymflow
