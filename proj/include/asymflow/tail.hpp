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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "asymflow/grid.hpp"
#include "asymflow/rational.hpp"

namespace asymflow {

/// The two basis families spanning symbolic asymptotic tails:
///   Even(k) = ⟨x⟩^-k          (even function of x)
///   Odd(k)  = x·⟨x⟩^-(k+1)    (odd function of x)
/// Both decay like |x|^-k; k is called the order. The span is closed under
/// differentiation and multiplication, which is what makes exact bookkeeping
/// possible. In serialized form Even is written "A" and Odd is written "B".
enum class TermKind : int { Even = 0, Odd = 1 };

struct TermKey {
  int order = 0;
  TermKind kind = TermKind::Even;
  friend auto operator<=>(const TermKey&, const TermKey&) = default;
};

/// Value of a single basis element at x.
double basis_value(TermKind kind, int order, double x);

/// A finite linear combination of basis terms with exact rational
/// coefficients. Canonical form: zero coefficients never stored, so
/// structural equality equals mathematical equality.
class TailExpansion {
 public:
  TailExpansion() = default;

  static TailExpansion term(TermKind kind, int order, Rational coeff);

  /// Adds coeff to the (kind, order) entry; erases the entry if it cancels.
  void add_term(TermKind kind, int order, const Rational& coeff);

  /// Stored coefficient, or 0 when absent.
  Rational coefficient(TermKind kind, int order) const;

  bool empty() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  /// Smallest/largest order among stored terms; callers must check empty().
  int min_order() const;
  int max_order() const;

  /// Terms with order <= max_order survive; the rest are returned separately
  /// (for demotion into a gridded remainder).
  std::pair<TailExpansion, TailExpansion> split_at(int max_order) const;

  /// Exact term-by-term derivative:
  ///   Even(k)' = -k·Odd(k+1)
  ///   Odd(k)'  = -k·Even(k+1) + (k+1)·Even(k+3)
  TailExpansion derivative() const;

  double eval(double x) const;

  /// Evaluates on every grid node; scale·value is accumulated into out.
  void accumulate_samples(const Grid& g, double scale,
                          std::vector<double>& out) const;
  std::vector<double> sample(const Grid& g) const;

  /// Largest coefficient-weighted bound on |tail(x)| for |x| >= x0:
  /// sum of |coeff|·⟨x0⟩^-order (both families obey |basis| <= ⟨x⟩^-order).
  double decay_bound(double x0) const;

  const std::map<TermKey, Rational>& terms() const { return terms_; }

  TailExpansion& operator+=(const TailExpansion& o);
  TailExpansion& operator-=(const TailExpansion& o);
  TailExpansion& operator*=(const Rational& c);
  friend TailExpansion operator+(TailExpansion a, const TailExpansion& b) { return a += b; }
  friend TailExpansion operator-(TailExpansion a, const TailExpansion& b) { return a -= b; }
  friend TailExpansion operator*(TailExpansion a, const Rational& c) { return a *= c; }
  friend TailExpansion operator*(const Rational& c, TailExpansion a) { return a *= c; }

  /// Exact product via the closure identities
  ///   Even(j)·Even(k) = Even(j+k)
  ///   Even(j)·Odd(k)  = Odd(j+k)
  ///   Odd(j)·Odd(k)   = Even(j+k) - Even(j+k+2)   [x² = ⟨x⟩² - 1]
  friend TailExpansion operator*(const TailExpansion& a, const TailExpansion& b);

  friend bool operator==(const TailExpansion& a, const TailExpansion& b) {
    return a.terms_ == b.terms_;
  }

 private:
  std::map<TermKey, Rational> terms_;
};

/// Flattened double-precision snapshot of a TailExpansion for hot evaluation
/// loops: the rational→double conversions happen once at construction, so
/// per-point evaluation touches plain doubles only.
class FlatTail {
 public:
  FlatTail() = default;
  explicit FlatTail(const TailExpansion& t);
  double eval(double x) const;
  bool empty() const { return terms_.empty(); }

 private:
  struct Term {
    int order;
    bool odd;
    double coeff;
  };
  std::vector<Term> terms_;
};

/// Result of the telescoping decomposition e = Λ(summand) + leftover with
/// Λ(S) = S - S'' computed symbolically.
struct HelmholtzPreimage {
  TailExpansion summand;   ///< S = Σ_{j=0..l} e^(2j), per-term smallest l
  TailExpansion leftover;  ///< R = e^(2l+2), min order >= target_order + 1
};

/// Term-wise telescope: for a term of order k, l is the smallest value with
/// k + 2l + 2 >= target_order + 1, so the summand fits within target_order
/// and the leftover starts strictly beyond it. Rejects empty input.
HelmholtzPreimage tail_helmholtz_preimage(const TailExpansion& e, int target_order);

/// Coefficients of the one-sided expansions e(x) = Σ_p c_p^± x^-p as
/// x → ±∞, up to the requested order (inclusive), via the binomial series
/// ⟨x⟩^-k = |x|^-k (1 + x^-2)^(-k/2). Index p of the returned vectors is the
/// power of 1/x, starting at 0.
struct OneSidedCoeffs {
  std::vector<Rational> plus;
  std::vector<Rational> minus;
};
OneSidedCoeffs tail_to_onesided(const TailExpansion& e, int order);

/// Spec-facing variant with double-valued output.
std::pair<std::vector<double>, std::vector<double>> tail_to_c_coeffs(
    const TailExpansion& e, int order);

/// Inverse of tail_to_onesided restricted to orders [first_order, last_order]:
/// reconstructs the unique (a_k, b_k) tail whose one-sided expansions match
/// the given c^± exactly (triangular solve, exact arithmetic). Vectors are
/// indexed p - first_order.
TailExpansion tail_from_onesided(int first_order, int last_order,
                                 const std::vector<Rational>& c_plus,
                                 const std::vector<Rational>& c_minus);

}  // namespace asymflow
