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

#include <vector>

namespace asymflow {

/// 4th-order first derivative: centered 5-point stencil in the interior,
/// one-sided 5-point stencils at the outermost two nodes on each side.
/// Requires at least 5 samples.
std::vector<double> fd_derivative(const std::vector<double>& f, double h);

/// 4th-order second derivative: centered 5-point stencil in the interior,
/// one-sided 6-point stencils at the outermost two nodes on each side.
/// Requires at least 6 samples.
std::vector<double> fd_second_derivative(const std::vector<double>& f, double h);

/// Composite Simpson quadrature over the full grid; sample count must be odd
/// (even interval count).
double simpson(const std::vector<double>& f, double h);

}  // namespace asymflow
