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

#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "asymflow/asymfun.hpp"
#include "asymflow/dynamics.hpp"
#include "asymflow/grid.hpp"

namespace asymflow {

/// Brute-force quadrature reference for the one-sided smoothing transforms
///   Q±(g)(x) = ∫₀^∞ g(x ∓ z) e^{-z} dz      (sign = +1 gives Q₊)
/// evaluated by adaptive Gauss–Kronrod to absolute tolerance 1e-12. This is
/// the independent yardstick the O(h⁴) scan implementations are certified
/// against; it shares no code with them.
double oracle_q(const std::function<double(double)>& g, double x, int sign);
double oracle_q_plus(const std::function<double(double)>& g, double x);
double oracle_q_minus(const std::function<double(double)>& g, double x);

/// One snapshot's coefficient record. internal_* read the solver's exact tail
/// bookkeeping; fitted_* come from a least-squares fit of the raw Eulerian
/// samples over the outer window and share nothing with that bookkeeping —
/// agreement between the two columns is the guard against "conservation by
/// construction". Entry j holds order first + j.
struct CoeffRow {
  double t{0.0};
  std::vector<double> internal_even;  // a_k
  std::vector<double> internal_odd;   // b_k
  std::vector<double> fitted_even;
  std::vector<double> fitted_odd;
  bool fit_ok{true};
  double fit_condition{0.0};  // condition number of the scaled design matrix
};

/// Tracks tail coefficients of orders first..last across a trajectory.
/// Defaults (first = last = -1) take the range n..N of the solution's own
/// space. The fit spans `guard` extra orders beyond `last` internally —
/// evolving content just past the reported range would otherwise alias onto
/// the reported columns — but only first..last are returned. A snapshot whose
/// design matrix conditions above the library cap is flagged (fit_ok = false,
/// fitted values NaN) instead of aborting the series. Snapshots are
/// independent, so threads >= 2 fits them concurrently (bitwise-identical
/// output).
std::vector<CoeffRow> track_coefficients(const Trajectory& traj, int first = -1,
                                         int last = -1, int guard = 2,
                                         int threads = 1);

/// ∫ u² + (u')² dx per snapshot by composite Simpson over the grid window,
/// the quadratic invariant of the b = 2 flow. Other b values get a NaN-filled
/// series (the integral exists but is not conserved; emitting it would invite
/// misreading), keeping downstream tables rectangular.
std::vector<double> track_energy(const Trajectory& traj, double b);

struct CrestRow {
  double t{0.0};
  double x{0.0};       // argmax of u, refined between nodes
  double height{0.0};  // u at the refined crest
};

/// Locates the solution's crest per snapshot: grid argmax, then the vertex of
/// the parabola through the three surrounding nodes (sub-grid accuracy for a
/// smooth peak). Boundary maxima are reported at the node itself.
std::vector<CrestRow> track_crest(const Trajectory& traj);

/// Slope of the least-squares line through (t_i, y_i). Needs two or more
/// points and non-identical abscissae; throws ConfigError otherwise.
double least_squares_slope(const std::vector<double>& t,
                           const std::vector<double>& y);

struct DiagnosticsTable {
  int first_order{0};
  int last_order{0};
  std::vector<CoeffRow> coeffs;
  std::vector<double> energy;  // NaN unless the run's b is exactly 2
  std::vector<CrestRow> crest;
  std::vector<double> phi_prime_min;  // certified flow-map slope per snapshot
};

/// Runs every tracker over a trajectory at the solution's own order range.
DiagnosticsTable diagnose(const Trajectory& traj, int threads = 1);

/// CSV with the pinned column layout
///   t, a_n..a_N, b_n..b_N, fitted_a_n.., fitted_b_n.., energy, crest_x,
///   phi_prime_min
/// one row per snapshot, 17 significant digits, NaN cells spelled "nan".
void write_diagnostics_csv(std::ostream& os, const DiagnosticsTable& table);

/// One refinement ladder: per-level step sizes, sup-norm differences between
/// consecutive levels at t = T (size levels-1), and observed orders
/// log2(e_i / e_{i+1}) (size levels-2). Differences at or below 1e-13 are
/// noise; the order entry is NaN there instead of a meaningless ratio.
struct Ladder {
  std::vector<double> dt;
  std::vector<double> spacing;
  std::vector<double> errors;
  std::vector<double> orders;
};

struct ConvergenceReport {
  Ladder temporal;  // dt halves on the base grid
  Ladder spatial;   // h and dt halve together (fixed dt/h stays guard-safe)
};

/// Self-convergence study: the temporal ladder halves dt on the base grid
/// (the shared spatial bias cancels in consecutive differences); the spatial
/// ladder halves h and dt together and compares levels on the coarser level's
/// nodes. Initial data is rebuilt per level by make_u0 on that level's grid.
/// levels >= 3 — two differences make one observed order — else ConfigError.
/// A level that fails to complete throws ConvergenceError naming the level.
/// Both ladders honor config.path. Temporal order is only observable on the
/// conjugated route: the default route evaluates its stage map through grid
/// interpolation, whose cell-boundary kinks leave a first-order-in-dt tail at
/// an absolute scale far below the spatial error (harmless in use, but it is
/// what a fixed-grid dt-ladder resolves).
ConvergenceReport convergence_harness(
    const SolverConfig& config,
    const std::function<AsymFunction(const Grid&)>& make_u0, int levels);

}  // namespace asymflow
