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

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "asymflow/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "asymflow: Lagrangian solver for the b-family of shallow-water "
      "equations on asymptotically controlled function spaces"};
  app.require_subcommand(1);

  std::string config;
  std::string out = "asymflow-out";
  int threads = 1;
  int levels = 3;
  std::uint64_t seed = 20260814u;
  std::string depth = "quick";

  CLI::App* run = app.add_subcommand(
      "run", "integrate a configured problem and write snapshots");
  run->add_option("config", config, "INI configuration file")->required();
  run->add_option("--out", out, "output directory (default asymflow-out)");
  run->add_option("--threads", threads, "worker threads (default 1)");

  CLI::App* conv = app.add_subcommand(
      "convergence", "temporal and spatial self-convergence ladders");
  conv->add_option("config", config, "INI configuration file")->required();
  conv->add_option("--out", out, "output directory (default asymflow-out)");
  conv->add_option("--levels", levels, "refinement levels (default 3)");
  conv->add_option("--threads", threads, "worker threads (default 1)");

  app.add_subcommand("presets", "list the initial-data presets");

  CLI::App* verify =
      app.add_subcommand("verify", "self checks against independent oracles");
  verify->add_option("depth", depth, "quick | full (default quick)");
  verify->add_option("--seed", seed, "seed for the randomized corpora");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return asymflow::cmd_run(config, out, threads, std::cout);
    }
    if (conv->parsed()) {
      return asymflow::cmd_convergence(config, out, levels, threads, std::cout);
    }
    if (verify->parsed()) {
      return asymflow::cmd_verify(depth, seed, std::cout);
    }
    return asymflow::cmd_presets(std::cout);
  } catch (const std::exception& e) {
    std::cerr << "asymflow: " << e.what() << "\n";
    return 3;
  }
}
