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

#include "asymflow/asymfun.hpp"
#include "asymflow/tail.hpp"

namespace asymflow {

struct AsymDiffeo;  // diffeo.hpp

// One-sided exponential transforms Q±(g)(x) = ∫₀^∞ g(x ∓ z) e^{-z} dz,
// computed by an O(n) recursion with the kernel integrated exactly against a
// local quintic reconstruction of g. `closure` describes g beyond the grid
// (analytic tail); nullptr means "zero out there" and is refused when the
// boundary mass is non-negligible.
Remainder q_plus(const Remainder& g, const TailExpansion* closure = nullptr);
Remainder q_minus(const Remainder& g, const TailExpansion* closure = nullptr);

// Q = (Q₊ + Q₋)/2; satisfies Λ(Q(g)) = g. threads >= 2 runs the two scans
// concurrently (bitwise-identical result).
Remainder q_full(const Remainder& g, const TailExpansion* closure = nullptr,
                 int threads = 1);

// Λu = u - u'' with exact tail algebra and 4th-order differences on the
// remainder; meta (n, N, m-2). Requires m >= 3.
AsymFunction lambda_apply(const AsymFunction& u);

// Λ⁻¹v via the telescoping preimage for the tail and the Q scans for the
// remainder (leftover terms stay analytic until the scan). Meta: W flavor
// (n, N+2, m-2) -> (n, N, m); H flavor keeps N; m increases by 2.
AsymFunction lambda_inverse(const AsymFunction& v, int threads = 1);

// Cross-check solver for the conjugated operator: finds z with
// z - z''/phi'^2 + z' phi''/phi'^3 = w on the grid (2nd-order tridiagonal
// scheme, Dirichlet data from the tail of the Eulerian solution), i.e.
// z ≈ (Λ⁻¹(w∘phi⁻¹))∘phi without leaving Lagrangian coordinates.
AsymFunction conjugated_solve(const AsymDiffeo& phi, const AsymFunction& w);

}  // namespace asymflow
