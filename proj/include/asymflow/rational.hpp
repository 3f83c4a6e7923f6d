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

#include <cmath>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace asymflow {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational scalar used for all symbolic tail coefficients. The
/// telescoping preimage of the Helmholtz operator composes many derivative
/// recursions; exact arithmetic keeps the index bookkeeping drift-free.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Exact dyadic rational equal to the given double (every finite double is a
/// binary fraction). NaN/inf are rejected.
Rational rational_from_double(double x);

/// Generalized binomial coefficient alpha·(alpha−1)···(alpha−j+1)/j! for
/// rational alpha; binomial(alpha, 0) = 1.
Rational binomial(const Rational& alpha, int j);

}  // namespace asymflow
