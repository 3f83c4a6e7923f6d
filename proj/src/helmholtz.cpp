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

#include "asymflow/helmholtz.hpp"

#include <array>
#include <cmath>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "asymflow/diffeo.hpp"
#include "asymflow/errors.hpp"
#include "asymflow/fd.hpp"

namespace asymflow {

namespace {

// Reconstruction stencil in units of h around the kernel interval [0, h]:
// z-nodes at s*h for s in kStencil.
constexpr std::array<int, 6> kStencil{-2, -1, 0, 1, 2, 3};

// m_p = ∫₀^h z^p e^{-z} dz by the alternating series
// sum_j (-1)^j h^{p+j+1} / (j! (p+j+1)); the closed-form recurrence cancels
// catastrophically for small h.
std::array<double, 6> kernel_moments(double h) {
  std::array<double, 6> m{};
  for (int p = 0; p < 6; ++p) {
    double sum = 0.0, fact = 1.0;
    for (int j = 0; j < 80; ++j) {
      if (j > 0) fact *= j;
      const double term = std::pow(h, p + j + 1) / (fact * (p + j + 1));
      sum += (j % 2 == 0) ? term : -term;
      if (term <= 1e-20 * std::fabs(sum)) break;
    }
    m[p] = sum;
  }
  return m;
}

// Weights w_s with ∫₀^h P(z) e^{-z} dz = sum_s w_s P(s*h) exact for every
// polynomial P of degree <= 5.
std::array<double, 6> scan_weights(double h) {
  const auto m = kernel_moments(h);
  Eigen::Matrix<double, 6, 6> V;  // V(t, p) = stencil_t^p
  Eigen::Matrix<double, 6, 1> mh;
  for (int p = 0; p < 6; ++p) {
    mh(p) = m[p] / std::pow(h, p);
    for (int t = 0; t < 6; ++t) {
      V(t, p) = std::pow(static_cast<double>(kStencil[t]), p);
    }
  }
  const Eigen::Matrix<double, 6, 1> w = V.transpose().fullPivLu().solve(mh);
  std::array<double, 6> out{};
  for (int s = 0; s < 6; ++s) out[s] = w(s);
  return out;
}

struct Laguerre32 {
  std::array<double, 32> nodes{};
  std::array<double, 32> weights{};
};

// Gauss-Laguerre rule for ∫₀^∞ f(z) e^{-z} dz via the symmetric tridiagonal
// Jacobi matrix (diagonal 2i+1, off-diagonal i).
const Laguerre32& laguerre32() {
  static const Laguerre32 rule = [] {
    constexpr int n = 32;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      J(i, i) = 2 * i + 1;
      if (i > 0) J(i, i - 1) = J(i - 1, i) = i;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Laguerre32 out;
    for (int i = 0; i < n; ++i) {
      out.nodes[i] = es.eigenvalues()(i);
      const double v0 = es.eigenvectors()(0, i);
      out.weights[i] = v0 * v0;  // total mass ∫ e^{-z} dz = 1
    }
    return out;
  }();
  return rule;
}

// One scan; dir=+1 computes Q₊ left-to-right, dir=-1 computes Q₋ mirrored.
Remainder scan(const Remainder& g, const TailExpansion* closure, int dir) {
  const Grid& gr = g.grid;
  if (!closure && g.outer_max_abs() > 1e-10) {
    throw Error("q scan: non-negligible boundary mass requires a tail closure");
  }
  const auto sample = [&](int j) -> double {
    if (j >= 0 && j < gr.size) return g.samples[j];
    return closure ? closure->eval(gr.x(j)) : 0.0;
  };

  const std::array<double, 6> w = scan_weights(gr.spacing);
  const double decay = std::exp(-gr.spacing);
  std::vector<double> out(gr.size);

  // Seed at the inflow node: the whole integral lies beyond the grid, where g
  // is the analytic closure.
  const int i0 = dir > 0 ? 0 : gr.size - 1;
  double seed = 0.0;
  if (closure && !closure->empty()) {
    const auto& rule = laguerre32();
    for (int q = 0; q < 32; ++q) {
      seed += rule.weights[q] * closure->eval(gr.x(i0) - dir * rule.nodes[q]);
    }
  }
  out[i0] = seed;

  for (int step = 1; step < gr.size; ++step) {
    const int i = dir > 0 ? step : gr.size - 1 - step;
    double local = 0.0;
    for (int s = 0; s < 6; ++s) local += w[s] * sample(i - dir * kStencil[s]);
    out[i] = decay * out[i - dir] + local;
  }
  return Remainder{gr, g.decay_order, std::move(out)};
}

}  // namespace

Remainder q_plus(const Remainder& g, const TailExpansion* closure) {
  return scan(g, closure, +1);
}

Remainder q_minus(const Remainder& g, const TailExpansion* closure) {
  return scan(g, closure, -1);
}

Remainder q_full(const Remainder& g, const TailExpansion* closure, int threads) {
  Remainder qp{g.grid, g.decay_order, {}};
  Remainder qm{g.grid, g.decay_order, {}};
  if (threads >= 2) {
    std::thread worker([&] { qp = q_plus(g, closure); });
    qm = q_minus(g, closure);
    worker.join();
  } else {
    qp = q_plus(g, closure);
    qm = q_minus(g, closure);
  }
  for (int i = 0; i < g.grid.size; ++i) {
    qp.samples[i] = 0.5 * (qp.samples[i] + qm.samples[i]);
  }
  return qp;
}

AsymFunction lambda_apply(const AsymFunction& u) {
  if (u.meta.m < 3) throw Error("lambda_apply: requires m >= 3");
  const SpaceMeta out{u.meta.flavor, u.meta.n, u.meta.N, u.meta.m - 2};
  TailExpansion tail = u.tail;
  tail -= u.tail.derivative().derivative();
  const std::vector<double> d2 = fd_second_derivative(u.rem.samples, u.rem.grid.spacing);
  std::vector<double> samples(u.rem.samples.size());
  for (size_t i = 0; i < samples.size(); ++i) samples[i] = u.rem.samples[i] - d2[i];
  return af_from_parts(std::move(tail), std::move(samples), u.rem.grid, out);
}

AsymFunction lambda_inverse(const AsymFunction& v, int threads) {
  const int N_out = v.meta.flavor == Flavor::W ? std::max(v.meta.N - 2, 0) : v.meta.N;
  const SpaceMeta out{v.meta.flavor, v.meta.n, N_out, v.meta.m + 2};

  // Tail path: Λ(S) + R = tail exactly, with min_index(R) >= N_out + 1.
  TailExpansion S, R;
  if (!v.tail.empty()) {
    HelmholtzPreimage p = tail_helmholtz_preimage(v.tail, N_out);
    S = std::move(p.summand);
    R = std::move(p.leftover);
  }

  // Remainder path: Q applied to (remainder of v) + (sampled leftovers R),
  // with R as the analytic closure beyond the grid.
  std::vector<double> g_samples = v.rem.samples;
  if (!R.empty()) R.accumulate_samples(v.rem.grid, 1.0, g_samples);
  const Remainder g{v.rem.grid, v.meta.N, std::move(g_samples)};
  Remainder qg = q_full(g, &R, threads);

  return af_from_parts(std::move(S), std::move(qg.samples), v.rem.grid, out);
}

AsymFunction conjugated_solve(const AsymDiffeo& phi, const AsymFunction& w) {
  const Grid& g = w.rem.grid;
  if (!g.matches(phi.u.rem.grid)) {
    throw GridMismatchError("conjugated_solve: operands live on different grids");
  }
  if (!(phi.phi_prime_min > 0.0)) {
    throw Error("conjugated_solve: diffeomorphism certificate required");
  }
  const double h = g.spacing;
  const int n = g.size;

  // φ' = 1 + u' and φ'' = u'' on the nodes (exact tails + FD4 remainders).
  std::vector<double> dphi = fd_derivative(phi.u.rem.samples, h);
  phi.u.tail.derivative().accumulate_samples(g, 1.0, dphi);
  for (double& s : dphi) s += 1.0;
  std::vector<double> ddphi = fd_second_derivative(phi.u.rem.samples, h);
  phi.u.tail.derivative().derivative().accumulate_samples(g, 1.0, ddphi);

  // Eulerian tail: the preimage summand taken far past N bounds the ignored
  // leftover by <L>^{-(N+7)}; it supplies the Dirichlet data z(±L) = v(φ(±L))
  // and, truncated at N_out, the output's symbolic part.
  const int N_out =
      w.meta.flavor == Flavor::W ? std::max(w.meta.N - 2, 0) : w.meta.N;
  TailExpansion S_full;
  if (!w.tail.empty()) {
    S_full = tail_helmholtz_preimage(w.tail, w.meta.N + 6).summand;
  }
  const double z_left = S_full.eval(g.x(0) + af_eval(phi.u, g.x(0)));
  const double z_right = S_full.eval(g.x(n - 1) + af_eval(phi.u, g.x(n - 1)));

  // Second-order scheme for z - z''·p² + z'·φ''·p³ = w with p = 1/φ':
  //   a_i z_{i-1} + b_i z_i + c_i z_{i+1} = w_i,
  //   a/c = -p²/h² ∓ q/(2h), b = 1 + 2p²/h², q = φ''·p³.
  // b dominates |a| + |c| by 1, so the Thomas sweep cannot break down for a
  // genuine diffeomorphism; a vanishing pivot signals degeneracy.
  const std::vector<double> rhs_all = af_total_samples(w);
  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  z[0] = z_left;
  z[n - 1] = z_right;
  const int ni = n - 2;
  std::vector<double> cp(static_cast<std::size_t>(ni)), dp(static_cast<std::size_t>(ni));
  for (int k = 0; k < ni; ++k) {
    const int i = k + 1;
    const double p = 1.0 / dphi[i];
    const double p2 = p * p / (h * h);
    const double q = ddphi[i] * p * p * p / (2.0 * h);
    const double a = -p2 - q;
    const double b = 1.0 + 2.0 * p2;
    const double c = -p2 + q;
    double rhs = rhs_all[i];
    if (k == 0) rhs -= a * z_left;
    if (k == ni - 1) rhs -= c * z_right;
    const double denom = b - (k > 0 ? a * cp[k - 1] : 0.0);
    if (std::fabs(denom) < 1e-300) {
      throw Error("conjugated_solve: singular tridiagonal system");
    }
    cp[k] = (k == ni - 1 ? 0.0 : c) / denom;
    dp[k] = (rhs - (k > 0 ? a * dp[k - 1] : 0.0)) / denom;
  }
  for (int k = ni - 1; k >= 0; --k) {
    z[k + 1] = dp[k] - (k == ni - 1 ? 0.0 : cp[k] * z[k + 2]);
  }

  TailExpansion keep = S_full.split_at(N_out).first;
  FlatTail kflat(keep);
  std::vector<double> rem(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rem[i] = z[i] - kflat.eval(g.x(i));
  const SpaceMeta out{w.meta.flavor, w.meta.n, N_out, w.meta.m + 2};
  return af_from_parts(std::move(keep), std::move(rem), g, out);
}

}  // namespace asymflow
