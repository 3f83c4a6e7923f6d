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

#include "asymflow/tail.hpp"

#include <cmath>
#include <stdexcept>

#include "asymflow/errors.hpp"

namespace asymflow {

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw Error("rational_from_double: non-finite input");
  if (x == 0.0) return Rational(0);
  int exp2 = 0;
  const double mant = std::frexp(x, &exp2);  // x = mant·2^exp2, |mant| ∈ [0.5, 1)
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));  // exact
  const int shift = exp2 - 53;
  BigInt num(scaled);
  if (shift >= 0) return Rational(num << shift);
  return Rational(num, BigInt(1) << (-shift));
}

Rational binomial(const Rational& alpha, int j) {
  Rational result(1);
  for (int i = 0; i < j; ++i) {
    result *= (alpha - i);
    result /= (i + 1);
  }
  return result;
}

double basis_value(TermKind kind, int order, double x) {
  const double inv = 1.0 / bracket(x);
  double p = 1.0;
  for (int i = 0; i < order; ++i) p *= inv;
  if (kind == TermKind::Even) return p;
  return x * p * inv;
}

TailExpansion TailExpansion::term(TermKind kind, int order, Rational coeff) {
  TailExpansion e;
  e.add_term(kind, order, coeff);
  return e;
}

void TailExpansion::add_term(TermKind kind, int order, const Rational& coeff) {
  if (order < 0) throw Error("TailExpansion: negative order");
  if (coeff == 0) return;
  const TermKey key{order, kind};
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, coeff);
    return;
  }
  it->second += coeff;
  if (it->second == 0) terms_.erase(it);
}

Rational TailExpansion::coefficient(TermKind kind, int order) const {
  auto it = terms_.find(TermKey{order, kind});
  return it == terms_.end() ? Rational(0) : it->second;
}

int TailExpansion::min_order() const {
  if (terms_.empty()) throw Error("TailExpansion::min_order on empty expansion");
  return terms_.begin()->first.order;
}

int TailExpansion::max_order() const {
  if (terms_.empty()) throw Error("TailExpansion::max_order on empty expansion");
  return terms_.rbegin()->first.order;
}

std::pair<TailExpansion, TailExpansion> TailExpansion::split_at(int max_order) const {
  TailExpansion kept, excess;
  for (const auto& [key, c] : terms_) {
    (key.order <= max_order ? kept : excess).terms_.emplace(key, c);
  }
  return {std::move(kept), std::move(excess)};
}

TailExpansion TailExpansion::derivative() const {
  TailExpansion out;
  for (const auto& [key, c] : terms_) {
    const int k = key.order;
    if (key.kind == TermKind::Even) {
      if (k > 0) out.add_term(TermKind::Odd, k + 1, Rational(-k) * c);
    } else {
      if (k > 0) out.add_term(TermKind::Even, k + 1, Rational(-k) * c);
      out.add_term(TermKind::Even, k + 3, Rational(k + 1) * c);
    }
  }
  return out;
}

double TailExpansion::eval(double x) const {
  double sum = 0.0;
  for (const auto& [key, c] : terms_) {
    sum += to_double(c) * basis_value(key.kind, key.order, x);
  }
  return sum;
}

void TailExpansion::accumulate_samples(const Grid& g, double scale,
                                       std::vector<double>& out) const {
  if (terms_.empty()) return;
  if (static_cast<int>(out.size()) != g.size) {
    throw GridMismatchError("accumulate_samples: output size mismatch");
  }
  // Flatten once so the per-node loop touches plain doubles only.
  struct Flat {
    int order;
    bool odd;
    double coeff;
  };
  std::vector<Flat> flat;
  flat.reserve(terms_.size());
  int top = 0;
  for (const auto& [key, c] : terms_) {
    flat.push_back({key.order, key.kind == TermKind::Odd, scale * to_double(c)});
    top = std::max(top, key.order + 1);
  }
  std::vector<double> powers(static_cast<std::size_t>(top) + 1);
  for (int i = 0; i < g.size; ++i) {
    const double x = g.x(i);
    const double inv = 1.0 / bracket(x);
    powers[0] = 1.0;
    for (int p = 1; p <= top; ++p) powers[p] = powers[p - 1] * inv;
    double sum = 0.0;
    for (const Flat& t : flat) {
      sum += t.coeff * (t.odd ? x * powers[t.order + 1] : powers[t.order]);
    }
    out[i] += sum;
  }
}

std::vector<double> TailExpansion::sample(const Grid& g) const {
  std::vector<double> out(static_cast<std::size_t>(g.size), 0.0);
  accumulate_samples(g, 1.0, out);
  return out;
}

FlatTail::FlatTail(const TailExpansion& t) {
  terms_.reserve(t.terms().size());
  for (const auto& [key, c] : t.terms()) {
    terms_.push_back({key.order, key.kind == TermKind::Odd, to_double(c)});
  }
}

double FlatTail::eval(double x) const {
  if (terms_.empty()) return 0.0;
  const double inv = 1.0 / bracket(x);
  double sum = 0.0;
  for (const Term& t : terms_) {
    double p = 1.0;
    for (int i = 0; i < t.order; ++i) p *= inv;
    sum += t.coeff * (t.odd ? x * p * inv : p);
  }
  return sum;
}

double TailExpansion::decay_bound(double x0) const {
  const double inv = 1.0 / bracket(x0);
  double bound = 0.0;
  for (const auto& [key, c] : terms_) {
    double p = 1.0;
    for (int i = 0; i < key.order; ++i) p *= inv;
    bound += std::fabs(to_double(c)) * p;
  }
  return bound;
}

TailExpansion& TailExpansion::operator+=(const TailExpansion& o) {
  for (const auto& [key, c] : o.terms_) add_term(key.kind, key.order, c);
  return *this;
}

TailExpansion& TailExpansion::operator-=(const TailExpansion& o) {
  for (const auto& [key, c] : o.terms_) add_term(key.kind, key.order, -c);
  return *this;
}

TailExpansion& TailExpansion::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [key, coeff] : terms_) coeff *= c;
  return *this;
}

TailExpansion operator*(const TailExpansion& a, const TailExpansion& b) {
  TailExpansion out;
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      const Rational c = ca * cb;
      const int k = ka.order + kb.order;
      const bool a_odd = ka.kind == TermKind::Odd;
      const bool b_odd = kb.kind == TermKind::Odd;
      if (!a_odd && !b_odd) {
        out.add_term(TermKind::Even, k, c);
      } else if (a_odd && b_odd) {
        out.add_term(TermKind::Even, k, c);
        out.add_term(TermKind::Even, k + 2, -c);
      } else {
        out.add_term(TermKind::Odd, k, c);
      }
    }
  }
  return out;
}

HelmholtzPreimage tail_helmholtz_preimage(const TailExpansion& e, int target_order) {
  if (e.empty()) throw Error("tail_helmholtz_preimage: empty expansion");
  if (target_order < 0) throw Error("tail_helmholtz_preimage: negative target order");
  HelmholtzPreimage out;
  for (const auto& [key, c] : e.terms()) {
    int l = 0;
    while (key.order + 2 * l + 2 < target_order + 1) ++l;
    TailExpansion cur = TailExpansion::term(key.kind, key.order, c);
    for (int j = 0;; ++j) {
      out.summand += cur;
      if (j == l) break;
      cur = cur.derivative().derivative();
    }
    out.leftover += cur.derivative().derivative();
  }
  return out;
}

OneSidedCoeffs tail_to_onesided(const TailExpansion& e, int order) {
  if (order < 0) throw Error("tail_to_onesided: negative order");
  OneSidedCoeffs c;
  c.plus.assign(static_cast<std::size_t>(order) + 1, Rational(0));
  c.minus.assign(static_cast<std::size_t>(order) + 1, Rational(0));
  for (const auto& [key, coeff] : e.terms()) {
    const int k = key.order;
    // Alpha is the binomial exponent of (1 + x^-2); the left-side sign is
    // (-1)^k for Even terms and (-1)^(k+1) for Odd terms (sign of x·|x|^-1).
    const bool is_odd = key.kind == TermKind::Odd;
    const Rational alpha = is_odd ? Rational(-(k + 1), 2) : Rational(-k, 2);
    const bool negate_left = is_odd ? ((k + 1) % 2 != 0) : (k % 2 != 0);
    for (int j = 0; k + 2 * j <= order; ++j) {
      const Rational t = coeff * binomial(alpha, j);
      c.plus[k + 2 * j] += t;
      c.minus[k + 2 * j] += negate_left ? -t : t;
    }
  }
  return c;
}

std::pair<std::vector<double>, std::vector<double>> tail_to_c_coeffs(
    const TailExpansion& e, int order) {
  const OneSidedCoeffs c = tail_to_onesided(e, order);
  std::vector<double> plus(c.plus.size()), minus(c.minus.size());
  for (std::size_t i = 0; i < c.plus.size(); ++i) {
    plus[i] = to_double(c.plus[i]);
    minus[i] = to_double(c.minus[i]);
  }
  return {std::move(plus), std::move(minus)};
}

TailExpansion tail_from_onesided(int first_order, int last_order,
                                 const std::vector<Rational>& c_plus,
                                 const std::vector<Rational>& c_minus) {
  const auto span = static_cast<std::size_t>(last_order - first_order + 1);
  if (first_order < 0 || last_order < first_order || c_plus.size() != span ||
      c_minus.size() != span) {
    throw Error("tail_from_onesided: inconsistent order range");
  }
  TailExpansion out;
  for (int p = first_order; p <= last_order; ++p) {
    // Strip the one-sided contributions of already-recovered lower orders.
    const OneSidedCoeffs sofar = tail_to_onesided(out, p);
    const Rational sp = c_plus[p - first_order] - sofar.plus[p];
    const Rational sm = c_minus[p - first_order] - sofar.minus[p];
    // At order p itself: a_p + b_p = sp and (-1)^p (a_p - b_p) = sm.
    const Rational diff = (p % 2 != 0) ? -sm : sm;
    out.add_term(TermKind::Even, p, (sp + diff) / 2);
    out.add_term(TermKind::Odd, p, (sp - diff) / 2);
  }
  return out;
}

}  // namespace asymflow
