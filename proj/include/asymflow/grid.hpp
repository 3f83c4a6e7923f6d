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

namespace asymflow {

/// Uniform symmetric grid x_i = -L + i·h on [-L, L]. The number of intervals
/// 2L/h must be an even integer (composite Simpson quadrature needs an even
/// count; symmetry puts a node exactly at x = 0).
struct Grid {
  double half_width = 0.0;  ///< L
  double spacing = 0.0;     ///< h
  int size = 0;             ///< node count, 2L/h + 1

  /// Validating factory; throws ConfigError on a non-integral or odd 2L/h.
  static Grid make(double L, double h);

  double x(int i) const { return -half_width + spacing * static_cast<double>(i); }

  /// Largest i with x_i <= x, clamped to [0, size-2]; callers handle off-grid x.
  int interval_below(double x) const {
    int i = static_cast<int>(std::floor((x + half_width) / spacing));
    if (i < 0) i = 0;
    if (i > size - 2) i = size - 2;
    return i;
  }

  bool matches(const Grid& o) const {
    return half_width == o.half_width && spacing == o.spacing && size == o.size;
  }
};

/// sqrt(1 + x²), the smooth surrogate for |x| the asymptotic basis is built on.
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

}  // namespace asymflow
