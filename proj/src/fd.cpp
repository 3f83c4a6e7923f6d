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

#include "asymflow/fd.hpp"

#include "asymflow/errors.hpp"

namespace asymflow {

std::vector<double> fd_derivative(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 5) throw Error("fd_derivative: need at least 5 samples");
  std::vector<double> d(f.size());
  const double s = 1.0 / (12.0 * h);
  d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) * s;
  d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) * s;
  for (int i = 2; i < n - 2; ++i) {
    d[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) * s;
  }
  d[n - 2] = (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3] + 6 * f[n - 4] - f[n - 5]) * s;
  d[n - 1] = (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3] - 16 * f[n - 4] + 3 * f[n - 5]) * s;
  return d;
}

std::vector<double> fd_second_derivative(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 6) throw Error("fd_second_derivative: need at least 6 samples");
  std::vector<double> d(f.size());
  const double s = 1.0 / (12.0 * h * h);
  d[0] = (45 * f[0] - 154 * f[1] + 214 * f[2] - 156 * f[3] + 61 * f[4] - 10 * f[5]) * s;
  d[1] = (10 * f[0] - 15 * f[1] - 4 * f[2] + 14 * f[3] - 6 * f[4] + f[5]) * s;
  for (int i = 2; i < n - 2; ++i) {
    d[i] = (-f[i - 2] + 16 * f[i - 1] - 30 * f[i] + 16 * f[i + 1] - f[i + 2]) * s;
  }
  d[n - 2] = (10 * f[n - 1] - 15 * f[n - 2] - 4 * f[n - 3] + 14 * f[n - 4] - 6 * f[n - 5] + f[n - 6]) * s;
  d[n - 1] = (45 * f[n - 1] - 154 * f[n - 2] + 214 * f[n - 3] - 156 * f[n - 4] + 61 * f[n - 5] - 10 * f[n - 6]) * s;
  return d;
}

double simpson(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 3 || n % 2 == 0) throw Error("simpson: need an odd sample count");
  double odd_sum = 0.0, even_sum = 0.0;
  for (int i = 1; i < n - 1; i += 2) odd_sum += f[i];
  for (int i = 2; i < n - 1; i += 2) even_sum += f[i];
  return (f[0] + f[n - 1] + 4.0 * odd_sum + 2.0 * even_sum) * h / 3.0;
}

}  // namespace asymflow
