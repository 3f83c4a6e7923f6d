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

#include "asymflow/asymfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "asymflow/errors.hpp"
#include "asymflow/fd.hpp"
#include "asymflow/interp.hpp"

namespace asymflow {

namespace {

void require_compatible(const AsymFunction& a, const AsymFunction& b) {
  if (!a.rem.grid.matches(b.rem.grid)) {
    throw GridMismatchError("operands live on different grids");
  }
  if (a.meta.flavor != b.meta.flavor) {
    throw Error("operands live in different flavors (W vs H)");
  }
}

}  // namespace

AdmissionPolicy AdmissionPolicy::unchecked() {
  return AdmissionPolicy{std::numeric_limits<double>::infinity()};
}

// Operations construct through the same validating constructor but without the
// admission gate: certificate growth through arithmetic is the caller's
// concern (the solver re-checks at the points that matter).
AsymFunction af_from_parts(TailExpansion tail, std::vector<double> samples,
                           const Grid& grid, const SpaceMeta& meta) {
  auto [kept, excess] = tail.split_at(meta.N);
  if (!excess.empty()) excess.accumulate_samples(grid, 1.0, samples);
  return AsymFunction(std::move(kept), Remainder{grid, meta.N, std::move(samples)},
                      meta, AdmissionPolicy::unchecked());
}

void space_validate(const SpaceMeta& meta) {
  if (meta.m < 1) throw Error("space meta: regularity order m must be >= 1");
  if (meta.n < 0 || meta.N < 0) throw Error("space meta: tail indices must be >= 0");
}

double Remainder::outer_max_abs() const {
  const int w = std::max(1, grid.size / 20);
  double mx = 0.0;
  for (int i = 0; i < w; ++i) {
    mx = std::max(mx, std::fabs(samples[i]));
    mx = std::max(mx, std::fabs(samples[grid.size - 1 - i]));
  }
  return mx;
}

double Remainder::boundary_certificate() const {
  return outer_max_abs() * std::pow(bracket(grid.half_width), decay_order);
}

AsymFunction::AsymFunction(TailExpansion tail_, Remainder rem_, SpaceMeta meta_,
                           AdmissionPolicy policy)
    : tail(std::move(tail_)), rem(std::move(rem_)), meta(meta_) {
  space_validate(meta);
  if (static_cast<int>(rem.samples.size()) != rem.grid.size) {
    throw Error("remainder sample count does not match its grid");
  }
  if (rem.decay_order != meta.N) {
    throw Error("remainder decay order must equal meta.N");
  }
  for (double s : rem.samples) {
    if (!std::isfinite(s)) throw Error("remainder contains a non-finite sample");
  }
  if (!tail.empty()) {
    if (tail.min_order() < meta.n || tail.max_order() > meta.N) {
      throw Error("tail indices fall outside [n, N]");
    }
  }
  const double cert = rem.boundary_certificate();
  if (cert > policy.reject_above) {
    throw DomainDecayError("remainder visibly violates the claimed decay at the edge "
                           "(certificate " + std::to_string(cert) + ")");
  }
}

double af_eval(const AsymFunction& u, double x) {
  return u.tail.eval(x) + interp6(u.rem.samples, u.rem.grid, x);
}

std::vector<double> af_total_samples(const AsymFunction& u) {
  std::vector<double> out = u.rem.samples;
  u.tail.accumulate_samples(u.rem.grid, 1.0, out);
  return out;
}

AsymFunction af_zero(const Grid& grid, const SpaceMeta& meta) {
  return AsymFunction(TailExpansion{},
                      Remainder{grid, meta.N, std::vector<double>(grid.size, 0.0)},
                      meta);
}

AsymFunction af_add(const AsymFunction& u1, const AsymFunction& u2) {
  return af_add_scaled(u1, 1.0, u2);
}

AsymFunction af_scale(const AsymFunction& u, double c) {
  TailExpansion tail = u.tail * rational_from_double(c);
  std::vector<double> samples(u.rem.samples.size());
  for (size_t i = 0; i < samples.size(); ++i) samples[i] = c * u.rem.samples[i];
  return AsymFunction(std::move(tail),
                      Remainder{u.rem.grid, u.meta.N, std::move(samples)}, u.meta,
                      AdmissionPolicy::unchecked());
}

AsymFunction af_add_scaled(const AsymFunction& u, double c, const AsymFunction& v) {
  require_compatible(u, v);
  const SpaceMeta out{u.meta.flavor, std::min(u.meta.n, v.meta.n),
                      std::min(u.meta.N, v.meta.N), std::min(u.meta.m, v.meta.m)};
  TailExpansion tail = u.tail + v.tail * rational_from_double(c);
  std::vector<double> samples(u.rem.samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    samples[i] = u.rem.samples[i] + c * v.rem.samples[i];
  }
  return af_from_parts(std::move(tail), std::move(samples), u.rem.grid, out);
}

AsymFunction af_product(const AsymFunction& u1, const AsymFunction& u2,
                        int max_decay_cap) {
  require_compatible(u1, u2);
  const SpaceMeta out{
      u1.meta.flavor, u1.meta.n + u2.meta.n,
      std::min(std::min(u1.meta.N + u2.meta.n, u2.meta.N + u1.meta.n), max_decay_cap),
      std::min(u1.meta.m, u2.meta.m)};
  TailExpansion tail = u1.tail * u2.tail;
  const std::vector<double> t1 = u1.tail.sample(u1.rem.grid);
  const std::vector<double> t2 = u2.tail.sample(u2.rem.grid);
  std::vector<double> samples(u1.rem.samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    const double r1 = u1.rem.samples[i], r2 = u2.rem.samples[i];
    samples[i] = t1[i] * r2 + r1 * t2[i] + r1 * r2;
  }
  return af_from_parts(std::move(tail), std::move(samples), u1.rem.grid, out);
}

AsymFunction af_derivative(const AsymFunction& u) {
  if (u.meta.m < 2) throw Error("af_derivative: requires m >= 2");
  const SpaceMeta out{u.meta.flavor, u.meta.n + 1,
                      u.meta.flavor == Flavor::W ? u.meta.N + 1 : u.meta.N,
                      u.meta.m - 1};
  return af_from_parts(u.tail.derivative(),
                          fd_derivative(u.rem.samples, u.rem.grid.spacing),
                          u.rem.grid, out);
}

AsymFunction af_reciprocal_one_plus(const AsymFunction& g) {
  if (!g.tail.empty() && g.tail.min_order() == 0) {
    throw Error("af_reciprocal_one_plus: order-0 tail terms are not supported");
  }
  const Grid& grid = g.rem.grid;
  const std::vector<double> tot = af_total_samples(g);
  double lo = std::numeric_limits<double>::infinity();
  for (double x : tot) lo = std::min(lo, 1.0 + x);
  if (!(lo > 1e-12) || g.tail.decay_bound(grid.half_width) >= 1.0) {
    throw Error("af_reciprocal_one_plus: 1 + g is not bounded away from zero");
  }

  // Neumann series of the tail: 1/(1+t) - 1 = -t + t^2 - t^3 + ... Orders
  // grow by at least one per factor, so the series below meta.N is finite.
  TailExpansion series;
  TailExpansion power = g.tail;
  Rational sign(-1);
  for (int j = 1; j <= g.meta.N && !power.empty(); ++j) {
    series += power * sign;
    sign = -sign;
    power = (power * g.tail).split_at(g.meta.N).first;
  }

  std::vector<double> rem(grid.size);
  for (int i = 0; i < grid.size; ++i) {
    rem[i] = 1.0 / (1.0 + tot[i]) - 1.0 - series.eval(grid.x(i));
  }
  return af_from_parts(std::move(series), std::move(rem), grid, g.meta);
}

double af_norm(const AsymFunction& u) {
  double coeff = 0.0;
  for (const auto& [key, c] : u.tail.terms()) coeff += std::fabs(to_double(c));

  const Grid& g = u.rem.grid;
  double sq = 0.0;
  std::vector<double> d = u.rem.samples;
  std::vector<double> integrand(g.size);
  for (int j = 0; j <= u.meta.m; ++j) {
    if (j > 0) d = fd_derivative(d, g.spacing);
    const int expo = u.meta.flavor == Flavor::W ? u.meta.N + j : u.meta.N;
    for (int i = 0; i < g.size; ++i) {
      const double w = std::pow(bracket(g.x(i)), expo);
      integrand[i] = w * w * d[i] * d[i];
    }
    sq += simpson(integrand, g.spacing);
  }
  return coeff + std::sqrt(sq);
}

DecayReport af_decay_report(const AsymFunction& u, double boundary_tol) {
  const Grid& g = u.rem.grid;
  DecayReport rep;
  rep.boundary_tol = boundary_tol;
  rep.certified = true;
  std::vector<double> d = u.rem.samples;
  for (int j = 0; j < u.meta.m; ++j) {
    if (j > 0) d = fd_derivative(d, g.spacing);
    DecayRow row;
    row.j = j;
    for (int i = 0; i < g.size; ++i) {
      const double x = g.x(i);
      const double w = u.meta.flavor == Flavor::W
                           ? std::pow(bracket(x), u.meta.N + j + 0.5)
                           : std::pow(bracket(x), u.meta.N);
      const double v = std::fabs(d[i]) * w;
      if (v > row.sup_weighted) {
        row.sup_weighted = v;
        row.sup_location = x;
      }
      if (std::fabs(x) > 0.5 * g.half_width) row.outer_max = std::max(row.outer_max, v);
    }
    if (row.outer_max > boundary_tol) rep.certified = false;
    rep.rows.push_back(row);
  }
  return rep;
}

TailFit af_extract_coeffs_fit(const std::vector<double>& samples, const Grid& grid,
                              int first_order, int last_order) {
  if (static_cast<int>(samples.size()) != grid.size) {
    throw GridMismatchError("sample count does not match the grid");
  }
  if (first_order < 0 || last_order < first_order) {
    throw Error("af_extract_coeffs_fit: need 0 <= first_order <= last_order");
  }
  const int K = last_order - first_order + 1;

  // The window stops a collar short of the domain edge: the outermost nodes
  // carry one-sided-stencil and edge-extrapolation error from upstream
  // operations, and the near-collinear far-field columns amplify any such
  // localized contamination into the low-order coefficients.
  const double collar = std::max(1.0, 8.0 * grid.spacing);
  std::vector<int> rows;
  for (int i = 0; i < grid.size; ++i) {
    const double ax = std::fabs(grid.x(i));
    if (ax >= 0.5 * grid.half_width - 1e-12 &&
        ax <= grid.half_width - collar + 1e-12) {
      rows.push_back(i);
    }
  }

  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), 2 * K);
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    const double x = grid.x(rows[r]);
    const double br = bracket(x);
    for (int k = 0; k < K; ++k) {
      A(r, 2 * k) = std::pow(br, -(first_order + k));
      A(r, 2 * k + 1) = x * std::pow(br, -(first_order + k + 1));
    }
    b(r) = samples[rows[r]];
  }

  // Column scaling keeps the conditioning statement meaningful across widely
  // different basis magnitudes in the window.
  Eigen::VectorXd scale(2 * K);
  for (int c = 0; c < 2 * K; ++c) {
    const double nrm = A.col(c).norm();
    scale(c) = nrm > 0.0 ? 1.0 / nrm : 1.0;
    A.col(c) *= scale(c);
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                              : std::numeric_limits<double>::infinity();
  if (!std::isfinite(cond) || cond > 1e12) throw FitConditioningError("coefficient fit is ill-conditioned", cond);

  const Eigen::VectorXd y = svd.solve(b);
  const Eigen::VectorXd resid = A * y - b;

  TailFit fit;
  fit.first_order = first_order;
  fit.last_order = last_order;
  fit.condition_number = cond;
  fit.max_residual = resid.lpNorm<Eigen::Infinity>();
  fit.even_coeffs.resize(K);
  fit.odd_coeffs.resize(K);
  for (int k = 0; k < K; ++k) {
    fit.even_coeffs[k] = y(2 * k) * scale(2 * k);
    fit.odd_coeffs[k] = y(2 * k + 1) * scale(2 * k + 1);
  }
  return fit;
}

}  // namespace asymflow
