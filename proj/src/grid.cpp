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

#include "asymflow/grid.hpp"

#include <cmath>
#include <string>

#include "asymflow/errors.hpp"

namespace asymflow {

Grid Grid::make(double L, double h) {
  if (!(L > 0.0) || !(h > 0.0)) throw ConfigError("grid: L and h must be positive");
  const double intervals_real = 2.0 * L / h;
  const auto intervals = static_cast<long long>(std::llround(intervals_real));
  if (std::fabs(intervals_real - static_cast<double>(intervals)) >
      1e-9 * std::max(1.0, intervals_real)) {
    throw ConfigError("grid: 2L/h must be an integer (L=" + std::to_string(L) +
                      ", h=" + std::to_string(h) + ")");
  }
  if (intervals % 2 != 0) {
    throw ConfigError("grid: 2L/h must be even (Simpson quadrature, node at 0)");
  }
  if (intervals < 10) throw ConfigError("grid: too few nodes (need 2L/h >= 10)");
  Grid g;
  g.half_width = L;
  g.spacing = h;
  g.size = static_cast<int>(intervals) + 1;
  return g;
}

}  // namespace asymflow
