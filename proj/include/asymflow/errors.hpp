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

#include <stdexcept>
#include <string>

namespace asymflow {

/// Base class for all library failures.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two operands live on different grids (L or h differ).
struct GridMismatchError : Error {
  using Error::Error;
};

/// Malformed or inconsistent configuration (bad keys, failed validation,
/// stability-guard violation). Maps to CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

/// id + u failed the slope certificate 1 + u' > margin.
struct NotADiffeomorphismError : Error {
  double where;  ///< grid location of the offending slope
  NotADiffeomorphismError(const std::string& msg, double x)
      : Error(msg), where(x) {}
};

/// The time stepper lost the diffeomorphism property (blow-up indicator).
struct DiffeoLossError : Error {
  double time;  ///< certified horizon: last time the state was valid
  DiffeoLossError(const std::string& msg, double t) : Error(msg), time(t) {}
};

/// A remainder carries visible mass at its claimed decay order, or a
/// composition left the certified evaluation domain (grid too small).
struct DomainDecayError : Error {
  using Error::Error;
};

/// Least-squares coefficient extraction was too ill-conditioned to trust.
struct FitConditioningError : Error {
  double condition_number;
  FitConditioningError(const std::string& msg, double cond)
      : Error(msg), condition_number(cond) {}
};

/// Adaptive quadrature or root-finding failed to converge.
struct ConvergenceError : Error {
  using Error::Error;
};

}  // namespace asymflow
