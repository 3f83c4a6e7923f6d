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

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "asymflow/asymfun.hpp"
#include "asymflow/dynamics.hpp"

namespace asymflow {

/// Everything a run needs, parsed from one INI config file.
struct RunSetup {
  SolverConfig config;
  SpaceMeta meta;
  std::string preset{"zero"};
  std::map<std::string, double> preset_params;
  std::string raw_text;  ///< verbatim config text, recorded in the manifest
};

/// Strict INI parser. Sections and keys:
///   [equation]  b, path (invert_scan | conjugated)
///   [space]     flavor (W | H), n, N, m
///   [grid]      half_width, spacing
///   [time]      dt, T
///   [output]    every
///   [initial]   preset, plus numeric parameters for build_initial
/// Lines starting with '#' or ';' are comments. Unknown sections or keys,
/// duplicate keys, keys before any section, and malformed values all throw
/// ConfigError naming the offending line; missing keys keep their defaults.
RunSetup parse_run_config(std::istream& in);
RunSetup parse_run_config_text(const std::string& text);
RunSetup parse_run_config_file(const std::string& path);

struct PresetInfo {
  std::string name;
  std::string params;   ///< parameter list with defaults, human readable
  std::string summary;  ///< one-line description
};
std::vector<PresetInfo> list_presets();

/// Initial-data factory for setup.preset on the given grid (the grid is a
/// parameter so convergence studies can rebuild the data per level). Every
/// entry of setup.preset_params must be consumed; unknown or missing
/// parameters throw ConfigError.
AsymFunction build_initial(const RunSetup& setup, const Grid& grid);

/// `asymflow run`: integrate the configured problem and write
/// snapshot_NNNN.json, diagnostics.csv, u_final.csv and manifest.json into
/// out_dir. Returns 0 on success, 2 for configuration errors, 3 when the
/// solver loses its certificate mid-run (partial outputs and the certified
/// horizon are still written).
int cmd_run(const std::string& config_path, const std::string& out_dir,
            int threads, std::ostream& log);

/// `asymflow convergence`: temporal and spatial self-convergence ladders for
/// the configured problem; prints the ladder table and writes
/// convergence.json into out_dir. Returns 0/2/3 like cmd_run.
int cmd_convergence(const std::string& config_path, const std::string& out_dir,
                    int levels, int threads, std::ostream& log);

/// `asymflow presets`: print the preset catalog. Returns 0.
int cmd_presets(std::ostream& os);

/// `asymflow verify`: built-in self checks against independent oracles.
/// depth is "quick" (seconds) or "full" (the long corpus, including
/// convergence-order ladders). Prints one "[verify] <name> PASS|FAIL" line
/// per check; returns 0 when all pass, 2 for an unknown depth, 3 otherwise.
int cmd_verify(const std::string& depth, std::uint64_t seed,
               std::ostream& log);

}  // namespace asymflow
