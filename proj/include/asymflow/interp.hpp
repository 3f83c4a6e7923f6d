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
#include <vector>

#include "asymflow/grid.hpp"

namespace asymflow {

/// Six-point (degree-5) local polynomial interpolation of uniform-grid
/// samples, evaluated by the first-form barycentric formula. Outside [-L, L]
/// the samples are treated as 0 (remainders are certified small at the edge).
/// Interior error is O(h^6) for smooth data.
inline double interp6(const std::vector<double>& f, const Grid& g, double x) {
  if (x < -g.half_width || x > g.half_width) return 0.0;
  const double t_global = (x + g.half_width) / g.spacing;
  int start = static_cast<int>(std::floor(t_global)) - 2;
  if (start < 0) start = 0;
  if (start > g.size - 6) start = g.size - 6;
  const double t = t_global - static_cast<double>(start);
  // Barycentric weights for 6 equispaced nodes: (-1)^j * C(5, j).
  static constexpr double kWeights[6] = {1.0, -5.0, 10.0, -10.0, 5.0, -1.0};
  double num = 0.0, den = 0.0;
  for (int j = 0; j < 6; ++j) {
    const double d = t - static_cast<double>(j);
    if (std::fabs(d) < 1e-12) return f[start + j];  // node hit
    const double w = kWeights[j] / d;
    num += w * f[start + j];
    den += w;
  }
  return num / den;
}

}  // namespace asymflow
