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
#include <utility>
#include <vector>

#include "asymflow/asymfun.hpp"

namespace asymflow {

/// An orientation-preserving diffeomorphism of the line written as
/// φ = id + u with an asymptotically-flat displacement u. phi_prime_min is
/// the certified lower bound on φ' = 1 + u' produced by dif_validate; ops
/// that build new diffeomorphisms re-certify their outputs.
struct AsymDiffeo {
  AsymFunction u;
  double phi_prime_min = 0.0;
};

/// Certifies that id + u is a diffeomorphism: evaluates 1 + u' on every grid
/// node (exact tail derivative + FD4 on the remainder) and bounds the tail
/// contribution beyond the grid. Throws NotADiffeomorphismError (carrying the
/// offending location) when the slope drops to margin or below.
AsymDiffeo dif_validate(const AsymFunction& u, double margin = 1e-6);

/// The identity diffeomorphism: zero displacement with the empty-tail
/// convention n = N + 1, so that composition with it copies every stored
/// tail coefficient of the other operand.
AsymDiffeo dif_identity(const Grid& g, Flavor flavor, int m, int N);

/// Function composition v ∘ φ. Tail coefficients of v with order
/// k <= min(n_v + n_φ, N_v) are copied unchanged (the induced corrections
/// fall at order n_v + n_φ + 1 or later); everything else lands in the
/// remainder, sampled as v(φ(x_i)) minus the copied tail. Requires matching
/// grids and flavors, n_φ >= 1 for W flavor, and that φ(±L) stays within
/// slack of the grid edge (else the remainder samples would rely on
/// uncertified interior values).
AsymFunction dif_compose_fn(const AsymFunction& v, const AsymDiffeo& phi,
                            double slack = 1.0, int threads = 1);

/// Group product (id + u1) ∘ (id + u2) = id + (u2 + u1∘φ2); revalidates.
AsymDiffeo dif_compose(const AsymDiffeo& phi1, const AsymDiffeo& phi2,
                       double margin = 1e-6, int threads = 1);

/// Group inverse. Each node solves y + u(y) = x_i by safeguarded Newton
/// (bisection fallback inside the bracket [x - ‖u‖∞, x + ‖u‖∞], 100
/// iteration cap -> ConvergenceError). The inverse displacement -u ∘ φ^{-1}
/// keeps the negated tail coefficients up to min(2 n_u, N_u); revalidates.
AsymDiffeo dif_invert(const AsymDiffeo& phi, double newton_tol = 1e-12,
                      double margin = 1e-6, int threads = 1);

/// Integrates φ̇ = u(t) ∘ φ, φ(0) = id with classical RK4 on the grid,
/// re-certifying the slope after every accepted step. Throws DiffeoLossError
/// carrying the last certified time when validation fails mid-flow. Returns
/// φ(T); if path is non-null, appends (t, φ(t)) after every accepted step.
AsymDiffeo dif_flow(const std::function<AsymFunction(double)>& u_of_t, double T,
                    double dt, double margin = 1e-6, int threads = 1,
                    std::vector<std::pair<double, AsymDiffeo>>* path = nullptr);

}  // namespace asymflow
