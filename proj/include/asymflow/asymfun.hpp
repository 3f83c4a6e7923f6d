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

#include "asymflow/grid.hpp"
#include "asymflow/tail.hpp"

namespace asymflow {

// Which weighted family the remainder lives in. W weights the j-th derivative
// by <x>^{N+j}; H uses the flat weight <x>^N for every derivative.
enum class Flavor : int { W = 0, H = 1 };

// Bookkeeping for the function space: leading tail index n, last tail index N,
// and regularity order m of the remainder.
struct SpaceMeta {
  Flavor flavor{Flavor::W};
  int n{1};
  int N{1};
  int m{3};

  bool operator==(const SpaceMeta&) const = default;
};

// Throws Error when the meta is structurally invalid (m < 1, negative
// indices). n >= N+1 is allowed and means "no tail terms".
void space_validate(const SpaceMeta& meta);

// Gridded part of an asymptotic function: samples on [-L, L] together with the
// decay order it claims, o(<x>^-decay_order) at the edges.
struct Remainder {
  Grid grid;
  int decay_order{0};
  std::vector<double> samples;

  // Largest |sample| over the outer 5% of nodes on each side.
  double outer_max_abs() const;
  // outer_max_abs() * <L>^decay_order; small iff the truncation at |x| = L is
  // consistent with the claimed decay.
  double boundary_certificate() const;
};

// Construction-time gate on the boundary certificate. The default cap rejects
// only visible violations of the claimed decay; stricter thresholds (e.g. the
// solver's boundary_tol) are applied by the callers that need them.
struct AdmissionPolicy {
  double reject_above{1e-2};

  // No certificate gate at all; used by arithmetic that must stay total.
  static AdmissionPolicy unchecked();
};

// Symbolic tail + gridded remainder + space bookkeeping. Immutable by
// convention: operations return new values.
struct AsymFunction {
  TailExpansion tail;
  Remainder rem;
  SpaceMeta meta;

  AsymFunction(TailExpansion tail_, Remainder rem_, SpaceMeta meta_,
               AdmissionPolicy policy = {});
};

// tail(x) + 6-point local polynomial interpolation of the remainder (zero
// outside the grid).
double af_eval(const AsymFunction& u, double x);

// Node values of tail + remainder on the grid.
std::vector<double> af_total_samples(const AsymFunction& u);

AsymFunction af_zero(const Grid& grid, const SpaceMeta& meta);

// Assembles tail + samples into a function with the given meta, demoting tail
// terms with index > meta.N into the samples. No admission gate.
AsymFunction af_from_parts(TailExpansion tail, std::vector<double> samples,
                           const Grid& grid, const SpaceMeta& meta);

// Vector-space operations. Output meta: n = min(n1,n2), N = min(N1,N2),
// m = min(m1,m2); tail terms beyond the output N are demoted to the remainder
// by sampling. Throws GridMismatchError / Error on incompatible inputs.
AsymFunction af_add(const AsymFunction& u1, const AsymFunction& u2);
AsymFunction af_scale(const AsymFunction& u, double c);
// u + c*v in one pass; same meta rules as af_add.
AsymFunction af_add_scaled(const AsymFunction& u, double c, const AsymFunction& v);

// Banach-algebra product. Output meta: n = n1+n2,
// N = min(N1+n2, N2+n1) capped at max_decay_cap, m = min(m1,m2).
AsymFunction af_product(const AsymFunction& u1, const AsymFunction& u2,
                        int max_decay_cap = 8);

// Exact tail derivative + 4th-order finite differences on the remainder.
// Meta: W flavor (n+1, N+1, m-1), H flavor (n+1, N, m-1). Requires m >= 2.
AsymFunction af_derivative(const AsymFunction& u);

// 1/(1 + g) - 1 for asymptotically small g, e.g. the reciprocal slope of a
// near-identity diffeomorphism. The tail is the truncated Neumann series
// -t + t^2 - t^3 + ... of g's tail; the remainder stores the exact node
// values minus that series. Meta is preserved. Throws Error when 1 + g is
// not bounded away from zero on the line, or when g's tail carries order-0
// terms (non-decaying limits have no polynomial reciprocal series).
AsymFunction af_reciprocal_one_plus(const AsymFunction& g);

// Coefficient part sum_k(|a_k| + |b_k|) plus the weighted Sobolev norm of the
// remainder: W flavor (sum_{j=0}^{m} int <x>^{2(N+j)} |f^(j)|^2 dx)^{1/2},
// H flavor with the flat weight <x>^{2N}.
double af_norm(const AsymFunction& u);

struct DecayRow {
  int j{0};                  // derivative order
  double sup_weighted{0.0};  // sup_i |f^(j)(x_i)| * weight(x_i)
  double sup_location{0.0};  // x_i attaining the sup
  double outer_max{0.0};     // same sup restricted to |x| > L/2
};

struct DecayReport {
  std::vector<DecayRow> rows;  // j = 0 .. m-1
  double boundary_tol{1e-8};
  bool certified{false};  // all outer maxima <= boundary_tol
};

// Weighted-sup decay diagnostics of the remainder: weight <x>^{N+j+1/2} for
// W flavor, <x>^N for H flavor.
DecayReport af_decay_report(const AsymFunction& u, double boundary_tol = 1e-8);

struct TailFit {
  int first_order{0};
  int last_order{0};
  std::vector<double> even_coeffs;  // a_k, k = first..last
  std::vector<double> odd_coeffs;   // b_k, k = first..last
  double condition_number{0.0};     // of the column-scaled design matrix
  double max_residual{0.0};         // sup |fit - samples| over the window
};

// Least-squares fit of raw solution samples in the window |x| in [L/2, L]
// against {<x>^-k, x<x>^-k-1 : first <= k <= last}. Independent of the
// solver's tail bookkeeping. Throws FitConditioningError above 1e12.
TailFit af_extract_coeffs_fit(const std::vector<double>& samples, const Grid& grid,
                              int first_order, int last_order);

}  // namespace asymflow
