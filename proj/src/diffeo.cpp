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

#include "asymflow/diffeo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "asymflow/errors.hpp"
#include "asymflow/fd.hpp"
#include "asymflow/interp.hpp"
#include "asymflow/tail.hpp"

namespace asymflow {

namespace {

void parallel_nodes(int n, int threads,
                    const std::function<void(int, int)>& work) {
  if (threads < 2 || n < 2048) {
    work(0, n);
    return;
  }
  const int nt = std::min(threads, 8);
  const int chunk = (n + nt - 1) / nt;
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(work, lo, hi);
  }
  for (auto& th : pool) th.join();
}

/// 1 + u' on every node: exact tail derivative plus FD4 of the remainder.
std::vector<double> slope_samples(const AsymFunction& u) {
  std::vector<double> s = fd_derivative(u.rem.samples, u.rem.grid.spacing);
  u.tail.derivative().accumulate_samples(u.rem.grid, 1.0, s);
  for (double& v : s) v += 1.0;
  return s;
}

}  // namespace

AsymDiffeo dif_validate(const AsymFunction& u, double margin) {
  const Grid& g = u.rem.grid;
  const std::vector<double> slope = slope_samples(u);
  double best = slope[0];
  double where = g.x(0);
  for (int i = 1; i < g.size; ++i) {
    if (slope[i] < best) {
      best = slope[i];
      where = g.x(i);
    }
  }
  // Beyond the grid only the tail acts; bound its derivative from L outward.
  const double outer = 1.0 - u.tail.derivative().decay_bound(g.half_width);
  if (outer < best) {
    best = outer;
    where = g.half_width;
  }
  if (!(best > margin)) {
    throw NotADiffeomorphismError(
        "dif_validate: slope 1 + u' reaches " + std::to_string(best) +
            " at x = " + std::to_string(where) + " (margin " +
            std::to_string(margin) + ")",
        where);
  }
  return AsymDiffeo{u, best};
}

AsymDiffeo dif_identity(const Grid& g, Flavor flavor, int m, int N) {
  return AsymDiffeo{af_zero(g, SpaceMeta{flavor, N + 1, N, m}), 1.0};
}

AsymFunction dif_compose_fn(const AsymFunction& v, const AsymDiffeo& phi,
                            double slack, int threads) {
  const Grid& g = v.rem.grid;
  if (!g.matches(phi.u.rem.grid)) {
    throw GridMismatchError("dif_compose_fn: operands live on different grids");
  }
  if (v.meta.flavor != phi.u.meta.flavor) {
    throw Error("dif_compose_fn: flavor mismatch between function and diffeomorphism");
  }
  if (v.meta.flavor == Flavor::W && phi.u.meta.n < 1) {
    throw Error("dif_compose_fn: W-flavor displacement must decay (n >= 1)");
  }

  const FlatTail utail(phi.u.tail);
  const auto phi_at = [&](double x) {
    return x + utail.eval(x) + interp6(phi.u.rem.samples, g, x);
  };
  const double L = g.half_width;
  if (std::fabs(phi_at(L)) < L - slack || std::fabs(phi_at(-L)) < L - slack) {
    throw Error(
        "dif_compose_fn: the grid edge maps too far inside [-L, L]; "
        "remainder samples there would depend on uncertified interior values");
  }

  // Coefficients through min(n_v + n_phi, N) are invariant under the
  // composition (the induced corrections start at order n_v + n_phi + 1);
  // copy them and sample everything else. The copied part is differenced
  // analytically so phi = id reproduces v exactly.
  const int cutoff = std::min(v.meta.n + phi.u.meta.n, v.meta.N);
  auto [copied, uncopied] = v.tail.split_at(cutoff);
  const FlatTail cflat(copied), uflat(uncopied);

  std::vector<double> rem(static_cast<std::size_t>(g.size));
  parallel_nodes(g.size, threads, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      const double x = g.x(i);
      const double px = phi_at(x);
      rem[i] = (cflat.eval(px) - cflat.eval(x)) + uflat.eval(px) +
               interp6(v.rem.samples, g, px);
    }
  });
  return af_from_parts(std::move(copied), std::move(rem), g, v.meta);
}

AsymDiffeo dif_compose(const AsymDiffeo& phi1, const AsymDiffeo& phi2,
                       double margin, int threads) {
  AsymFunction u = af_add(phi2.u, dif_compose_fn(phi1.u, phi2, 1.0, threads));
  return dif_validate(u, margin);
}

AsymDiffeo dif_invert(const AsymDiffeo& phi, double newton_tol, double margin,
                      int threads) {
  const AsymFunction& u = phi.u;
  const Grid& g = u.rem.grid;
  const FlatTail utail(u.tail);
  const AsymFunction du = af_derivative(u);
  const FlatTail dutail(du.tail);
  const auto ueval = [&](double y) {
    return utail.eval(y) + interp6(u.rem.samples, g, y);
  };
  const auto dueval = [&](double y) {
    return dutail.eval(y) + interp6(du.rem.samples, g, y);
  };

  // Bracket radius: sup |u|. The node max can undershoot the continuum sup
  // by O(h^2 u''), so cushion it with the between-node bound (h/2)·sup|u'|
  // plus the tail bound beyond the grid.
  double radius = u.tail.decay_bound(g.half_width);
  for (double s : af_total_samples(u)) radius = std::max(radius, std::fabs(s));
  double slope_max = du.tail.decay_bound(g.half_width);
  for (double s : af_total_samples(du)) slope_max = std::max(slope_max, std::fabs(s));
  radius += 0.5 * g.spacing * slope_max + 1e-9;

  std::vector<double> y(static_cast<std::size_t>(g.size));
  std::atomic<bool> failed{false};
  parallel_nodes(g.size, threads, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      const double x = g.x(i);
      // f(y) = y + u(y) - x is increasing with a sign change inside the
      // bracket; Newton from the Picard start, bisection as the safeguard.
      double lob = x - radius, hib = x + radius;
      {
        // Certify the sign change, expanding geometrically if the cushion
        // was still too tight.
        double step = std::max(radius, 1e-6);
        int grow = 0;
        while (lob + ueval(lob) - x > 0.0 && grow++ < 80) {
          lob -= step;
          step *= 2.0;
        }
        while (hib + ueval(hib) - x < 0.0 && grow++ < 80) {
          hib += step;
          step *= 2.0;
        }
        if (grow >= 80) {
          failed.store(true);
          continue;
        }
      }
      double z = std::clamp(x - ueval(x), lob, hib);
      bool done = false;
      for (int it = 0; it < 100; ++it) {
        const double f = z + ueval(z) - x;
        if (std::fabs(f) <= newton_tol) {
          done = true;
          break;
        }
        (f > 0.0 ? hib : lob) = z;
        // The interpolant has O(h^6) jumps at cell boundaries; when the root
        // sits on one, |f| may bottom out above newton_tol. A collapsed
        // bracket locates y even more tightly than the f-tolerance does.
        if (hib - lob <= 1e-13 * std::max(1.0, std::fabs(x))) {
          z = 0.5 * (lob + hib);
          done = true;
          break;
        }
        const double dphi = 1.0 + dueval(z);
        double znew = dphi > 1e-8 ? z - f / dphi : 0.5 * (lob + hib);
        if (!(znew > lob && znew < hib)) znew = 0.5 * (lob + hib);
        z = znew;
      }
      if (!done) failed.store(true);
      y[i] = z;
    }
  });
  if (failed.load()) {
    throw ConvergenceError("dif_invert: node solve exceeded 100 iterations");
  }

  // Inverse displacement -u o phi^{-1}: negated coefficients survive through
  // min(2 n, N); the rest is sampled from the solved nodes.
  const int cutoff = std::min(2 * u.meta.n, u.meta.N);
  TailExpansion inv_tail = u.tail.split_at(cutoff).first * Rational(-1);
  const FlatTail iflat(inv_tail);
  std::vector<double> rem(static_cast<std::size_t>(g.size));
  for (int i = 0; i < g.size; ++i) {
    rem[i] = (y[i] - g.x(i)) - iflat.eval(g.x(i));
  }
  return dif_validate(
      af_from_parts(std::move(inv_tail), std::move(rem), g, u.meta), margin);
}

AsymDiffeo dif_flow(const std::function<AsymFunction(double)>& u_of_t, double T,
                    double dt, double margin, int threads,
                    std::vector<std::pair<double, AsymDiffeo>>* path) {
  if (!(T >= 0.0) || !(dt > 0.0)) {
    throw ConfigError("dif_flow: need T >= 0 and dt > 0");
  }
  const AsymFunction u0 = u_of_t(0.0);
  const Grid g = u0.rem.grid;
  AsymDiffeo cur =
      dif_identity(g, u0.meta.flavor, u0.meta.m, u0.meta.N);
  if (T == 0.0) return cur;

  const int steps = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-12)));
  const double h = T / static_cast<double>(steps);
  const auto rhs = [&](double tau, const AsymFunction& w) {
    return dif_compose_fn(u_of_t(tau), AsymDiffeo{w, cur.phi_prime_min}, 1.0,
                          threads);
  };
  for (int s = 0; s < steps; ++s) {
    const double t0 = static_cast<double>(s) * h;
    const AsymFunction& w = cur.u;
    const AsymFunction k1 = rhs(t0, w);
    const AsymFunction k2 = rhs(t0 + 0.5 * h, af_add_scaled(w, 0.5 * h, k1));
    const AsymFunction k3 = rhs(t0 + 0.5 * h, af_add_scaled(w, 0.5 * h, k2));
    const AsymFunction k4 = rhs(t0 + h, af_add_scaled(w, h, k3));
    AsymFunction next = af_add_scaled(w, h / 6.0, k1);
    next = af_add_scaled(next, h / 3.0, k2);
    next = af_add_scaled(next, h / 3.0, k3);
    next = af_add_scaled(next, h / 6.0, k4);
    const double t1 = (s + 1 == steps) ? T : t0 + h;
    try {
      cur = dif_validate(next, margin);
    } catch (const NotADiffeomorphismError& e) {
      throw DiffeoLossError(
          "dif_flow: diffeomorphism lost between t = " + std::to_string(t0) +
              " and t = " + std::to_string(t1) + " (slope fails near x = " +
              std::to_string(e.where) + ")",
          t0);
    }
    if (path) path->emplace_back(t1, cur);
  }
  return cur;
}

}  // namespace asymflow
