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

#include <string>
#include <vector>

#include "asymflow/asymfun.hpp"
#include "asymflow/diffeo.hpp"

namespace asymflow {

/// Which route computes the nonlocal half of the vector field.
enum class SolverPath : int {
  /// Pull the velocity back to fixed coordinates (Newton inversion of the
  /// flow map), apply the quadratic form and the Q-scan Helmholtz inverse
  /// there, then push forward again.
  kInvertAndScan = 0,
  /// Evaluate the conjugated right-hand side directly in flow-map variables
  /// and solve the conjugated Helmholtz system on the grid; no inversion.
  /// Second-order in h; kept as a fast switchable cross-check.
  kConjugated = 1,
};

struct SolverConfig {
  double b{2.0};              // family parameter (2 = CH, 3 = DP)
  double dt{1e-3};
  double T{1.0};
  double half_width{30.0};    // grid half width L
  double spacing{0.01};       // grid spacing h
  SolverPath path{SolverPath::kInvertAndScan};
  double boundary_tol{1e-1};  // cap on the remainder boundary certificate
  double newton_tol{1e-12};   // flow-map inversion tolerance
  double margin{1e-6};        // certified lower bound required of phi'
  double edge_slack{1.0};     // how far the flow may drift past the grid edge
  double stability_guard{0.5};  // dt <= guard * h / max(1, |u0|_inf)
  int output_every{100};      // snapshot cadence in steps (<= 0: endpoints)
  int threads{1};
};

/// Flow-map state: particle paths phi, Lagrangian velocity v = u o phi, the
/// frozen space bookkeeping of the initial data, and the family parameter.
struct SolverState {
  double t;
  AsymDiffeo phi;
  AsymFunction v;
  SpaceMeta meta;
  double b;
};

struct VectorFieldResult {
  AsymFunction dphi;
  AsymFunction dv;
};

struct Snapshot {
  double t;
  SolverState state;
  AsymFunction u;  // Eulerian reconstruction v o phi^{-1}
};

/// Per-step health record emitted by run().
struct StepDiag {
  double t;
  double phi_prime_min;
  double boundary_certificate;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<StepDiag> step_log;
  int steps{0};
  bool completed{false};
  double certified_time{0.0};  // last time with a valid flow-map certificate
  std::string failure;         // empty iff completed
};

/// The quadratic form -b u u' - (3-b) u' u''. Requires m >= 3; the output
/// lands two regularity orders lower and (for decaying tails) at least two
/// decay orders higher, which is exactly what lambda_inverse gives back.
AsymFunction beta_b(const AsymFunction& u, double b);

/// u - u''; the momentum density of the family.
AsymFunction reconstruct_momentum(const AsymFunction& u);

/// State at t = 0: phi = id, v = u0. Enforces m >= 3 and, for the W flavor,
/// a decaying leading tail (n >= 1). Tail coefficients are rounded once to
/// exact dyadic rationals so that step-by-step coefficient updates stay at
/// bounded precision (conserved coefficients are never touched afterwards).
SolverState initial_state(const AsymFunction& u0, double b);

/// u(t) = v o phi^{-1}; the expensive inversion happens here, so run() calls
/// this only at the snapshot cadence.
AsymFunction reconstruct_eulerian(const SolverState& s, const SolverConfig& cfg);

/// (dphi, dv) = (v, R_phi Lambda^{-1} beta_b R_{phi^{-1}} v) along the
/// configured path.
VectorFieldResult vector_field(const SolverState& s, const SolverConfig& cfg);

/// One classical RK4 step on (phi, v). Every stage revalidates the flow map;
/// a failed certificate surfaces as DiffeoLossError carrying the last
/// certified time.
SolverState step(const SolverState& s, double dt, const SolverConfig& cfg);

/// Largest dt the advective stability guard admits for this data.
double stability_limit(const SolverConfig& cfg, const AsymFunction& u0);

/// Fixed-step integration to T (dt shrinks slightly if it does not divide T).
/// Snapshots are taken at t = 0, every output_every steps, and at the final
/// time. On diffeomorphism loss or boundary-decay failure the trajectory is
/// returned partially filled with completed = false, the reason in failure,
/// and certified_time at the last healthy state. Configuration problems
/// (bad dt/T, stability guard, domain too small for the data) throw
/// ConfigError before any stepping.
Trajectory run(const SolverConfig& cfg, const AsymFunction& u0);

}  // namespace asymflow
