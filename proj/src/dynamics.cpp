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

#include "asymflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "asymflow/errors.hpp"
#include "asymflow/helmholtz.hpp"
#include "asymflow/rational.hpp"

namespace asymflow {

namespace {

// Round every tail coefficient to the nearest double and store it back as the
// exact dyadic rational. Idempotent; applied at step boundaries so that the
// coefficients of the evolving tail orders keep bounded arithmetic size.
// Conserved orders only ever meet additions with absent terms, so their
// stored values are never touched after the initial rounding.
AsymFunction snap_tail_dyadic(const AsymFunction& f) {
  if (f.tail.empty()) return f;
  TailExpansion t;
  for (const auto& [key, c] : f.tail.terms()) {
    t.add_term(key.kind, key.order, rational_from_double(to_double(c)));
  }
  return AsymFunction(std::move(t), f.rem, f.meta, AdmissionPolicy::unchecked());
}

// x * (1 + r)^k expanded through the binomial theorem, with the powers of r
// staying inside the decaying algebra: x + sum_j C(k,j) x r^j.
AsymFunction mul_one_plus_pow(const AsymFunction& x, const AsymFunction& r, int k) {
  AsymFunction acc = x;
  AsymFunction rp = r;
  double binom = k;
  for (int j = 1; j <= k; ++j) {
    acc = af_add_scaled(acc, binom, af_product(x, rp));
    if (j < k) {
      rp = af_product(rp, r);
      binom = binom * (k - j) / (j + 1);
    }
  }
  return acc;
}

SolverState rk_stage(const SolverState& base, double t, double a,
                     const VectorFieldResult& k, const SolverConfig& cfg) {
  AsymFunction pu = af_add_scaled(base.phi.u, a, k.dphi);
  AsymFunction v = af_add_scaled(base.v, a, k.dv);
  AsymDiffeo phi = dif_validate(std::move(pu), cfg.margin);
  return SolverState{t, std::move(phi), std::move(v), base.meta, base.b};
}

}  // namespace

AsymFunction beta_b(const AsymFunction& u, double b) {
  if (u.meta.m < 3) throw Error("beta_b: requires regularity m >= 3");
  const AsymFunction du = af_derivative(u);
  const AsymFunction ddu = af_derivative(du);
  const AsymFunction uux = af_product(u, du);
  const AsymFunction uxuxx = af_product(du, ddu);
  return af_add_scaled(af_scale(uux, -b), -(3.0 - b), uxuxx);
}

AsymFunction reconstruct_momentum(const AsymFunction& u) { return lambda_apply(u); }

SolverState initial_state(const AsymFunction& u0, double b) {
  if (u0.meta.m < 3) {
    throw ConfigError("initial data must have regularity m >= 3, got m = " +
                      std::to_string(u0.meta.m));
  }
  if (u0.meta.flavor == Flavor::W && u0.meta.n < 1) {
    throw ConfigError(
        "W-flavor initial data needs a decaying leading tail index (n >= 1)");
  }
  AsymDiffeo phi = dif_identity(u0.rem.grid, u0.meta.flavor, u0.meta.m, u0.meta.N);
  return SolverState{0.0, std::move(phi), snap_tail_dyadic(u0), u0.meta, b};
}

AsymFunction reconstruct_eulerian(const SolverState& s, const SolverConfig& cfg) {
  const AsymDiffeo inv = dif_invert(s.phi, cfg.newton_tol, cfg.margin, cfg.threads);
  return dif_compose_fn(s.v, inv, cfg.edge_slack, cfg.threads);
}

VectorFieldResult vector_field(const SolverState& s, const SolverConfig& cfg) {
  AsymFunction dv = [&]() -> AsymFunction {
    if (cfg.path == SolverPath::kInvertAndScan) {
      const AsymDiffeo inv =
          dif_invert(s.phi, cfg.newton_tol, cfg.margin, cfg.threads);
      const AsymFunction u = dif_compose_fn(s.v, inv, cfg.edge_slack, cfg.threads);
      const AsymFunction w = beta_b(u, s.b);
      const AsymFunction z = lambda_inverse(w, cfg.threads);
      return dif_compose_fn(z, s.phi, cfg.edge_slack, cfg.threads);
    }
    // Conjugated route: with p = 1/phi' = 1 + r, the pulled-back quadratic
    // form is -b v v' p + (3-b) (v')^2 phi'' p^4 - (3-b) v' v'' p^3.
    const AsymFunction du = af_derivative(s.phi.u);
    const AsymFunction ddu = af_derivative(du);
    const AsymFunction r = af_reciprocal_one_plus(du);
    const AsymFunction vx = af_derivative(s.v);
    const AsymFunction vxx = af_derivative(vx);
    const AsymFunction t1 = mul_one_plus_pow(af_product(s.v, vx), r, 1);
    const AsymFunction t2 =
        mul_one_plus_pow(af_product(af_product(vx, vx), ddu), r, 4);
    const AsymFunction t3 = mul_one_plus_pow(af_product(vx, vxx), r, 3);
    const AsymFunction w =
        af_add_scaled(af_scale(t1, -s.b), 3.0 - s.b, af_add_scaled(t2, -1.0, t3));
    return conjugated_solve(s.phi, w);
  }();
  return VectorFieldResult{s.v, std::move(dv)};
}

SolverState step(const SolverState& s, double dt, const SolverConfig& cfg) {
  if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
  try {
    const VectorFieldResult k1 = vector_field(s, cfg);
    const SolverState s2 = rk_stage(s, s.t + dt / 2, dt / 2, k1, cfg);
    const VectorFieldResult k2 = vector_field(s2, cfg);
    const SolverState s3 = rk_stage(s, s.t + dt / 2, dt / 2, k2, cfg);
    const VectorFieldResult k3 = vector_field(s3, cfg);
    const SolverState s4 = rk_stage(s, s.t + dt, dt, k3, cfg);
    const VectorFieldResult k4 = vector_field(s4, cfg);

    AsymFunction pu = af_add_scaled(s.phi.u, dt / 6, k1.dphi);
    pu = af_add_scaled(pu, dt / 3, k2.dphi);
    pu = af_add_scaled(pu, dt / 3, k3.dphi);
    pu = af_add_scaled(pu, dt / 6, k4.dphi);
    AsymFunction v = af_add_scaled(s.v, dt / 6, k1.dv);
    v = af_add_scaled(v, dt / 3, k2.dv);
    v = af_add_scaled(v, dt / 3, k3.dv);
    v = af_add_scaled(v, dt / 6, k4.dv);

    AsymDiffeo phi = dif_validate(snap_tail_dyadic(pu), cfg.margin);
    return SolverState{s.t + dt, std::move(phi), snap_tail_dyadic(v), s.meta, s.b};
  } catch (const NotADiffeomorphismError& e) {
    throw DiffeoLossError("flow map lost invertibility during the step from t = " +
                              std::to_string(s.t) + ": " + e.what(),
                          s.t);
  }
}

double stability_limit(const SolverConfig& cfg, const AsymFunction& u0) {
  double amp = 0.0;
  for (double x : af_total_samples(u0)) amp = std::max(amp, std::fabs(x));
  return cfg.stability_guard * cfg.spacing / std::max(1.0, amp);
}

Trajectory run(const SolverConfig& cfg, const AsymFunction& u0) {
  if (!(cfg.dt > 0.0)) throw ConfigError("run: dt must be positive");
  if (!(cfg.T > 0.0)) throw ConfigError("run: T must be positive");
  const Grid g = Grid::make(cfg.half_width, cfg.spacing);
  if (!g.matches(u0.rem.grid)) {
    throw GridMismatchError(
        "initial data lives on a different grid than the configuration");
  }
  const double dt_max = stability_limit(cfg, u0);
  if (cfg.dt > dt_max * (1.0 + 1e-12)) {
    throw ConfigError("dt = " + std::to_string(cfg.dt) +
                      " violates the advective stability guard dt <= guard*h/max(1,"
                      " |u0|_inf) = " +
                      std::to_string(dt_max) + "; reduce dt or refine the grid");
  }
  if (u0.rem.boundary_certificate() > cfg.boundary_tol) {
    throw ConfigError(
        "initial remainder violates the boundary decay certificate (" +
        std::to_string(u0.rem.boundary_certificate()) +
        " > boundary_tol); enlarge the grid half-width");
  }

  SolverState s = initial_state(u0, cfg.b);
  const int steps = std::max(1, static_cast<int>(std::ceil(cfg.T / cfg.dt - 1e-9)));
  const double dt = cfg.T / steps;

  Trajectory traj;
  traj.snapshots.push_back(Snapshot{0.0, s, reconstruct_eulerian(s, cfg)});
  for (int k = 1; k <= steps; ++k) {
    try {
      s = step(s, dt, cfg);
      s.t = k * dt;
      traj.steps = k;
      traj.certified_time = s.t;
      const double cert = s.v.rem.boundary_certificate();
      traj.step_log.push_back(StepDiag{s.t, s.phi.phi_prime_min, cert});
      if (cert > cfg.boundary_tol) {
        throw DomainDecayError(
            "boundary certificate " + std::to_string(cert) +
            " exceeded boundary_tol at t = " + std::to_string(s.t) +
            "; the grid window is too small for this flow");
      }
      if ((cfg.output_every > 0 && k % cfg.output_every == 0) || k == steps) {
        traj.snapshots.push_back(Snapshot{s.t, s, reconstruct_eulerian(s, cfg)});
      }
    } catch (const DiffeoLossError& e) {
      traj.completed = false;
      traj.failure = e.what();
      traj.certified_time = e.time;
      if (traj.snapshots.back().t < traj.certified_time - 1e-15) {
        try {
          traj.snapshots.push_back(Snapshot{s.t, s, reconstruct_eulerian(s, cfg)});
        } catch (...) {
          // The last certified state may already be too stiff to invert; the
          // trajectory simply ends at the previous snapshot then.
        }
      }
      return traj;
    } catch (const DomainDecayError& e) {
      traj.completed = false;
      traj.failure = e.what();
      try {
        traj.snapshots.push_back(Snapshot{s.t, s, reconstruct_eulerian(s, cfg)});
      } catch (...) {
      }
      return traj;
    }
  }
  traj.completed = true;
  return traj;
}

}  // namespace asymflow
