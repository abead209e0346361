// Copyright 2026 The swimopt Authors
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

// swimopt command line: simulate | sweep-train | depth-sweep | optimize

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "swimopt/harness/commands.hpp"

namespace {

using swimopt::harness::RunConfig;
using Command = std::function<nlohmann::json(const RunConfig&, const std::filesystem::path&)>;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::optional<std::string> method;
};

void add_common(CLI::App* sub, Options& opts) {
  sub->add_option("--config", opts.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", opts.seed, "seed override");
  sub->add_option("--out", opts.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gait optimization toolkit for a 2D articulated swimmer"};
  app.require_subcommand(1);
  Options opts;
  struct Entry {
    CLI::App* sub;
    Command run;
  };
  std::vector<Entry> entries{
      {app.add_subcommand("simulate", "run one episode and write its trajectory"), swimopt::harness::cmd_simulate},
      {app.add_subcommand("sweep-train", "generate a force dataset and train the surrogate"),
       swimopt::harness::cmd_sweep_and_train},
      {app.add_subcommand("depth-sweep", "train one surrogate per depth and tabulate losses"),
       swimopt::harness::cmd_depth_sweep},
      {app.add_subcommand("optimize", "hill climbing or baseline-guided search on the gait"),
       swimopt::harness::cmd_optimize},
  };
  for (auto& e : entries) add_common(e.sub, opts);
  entries.back().sub->add_option("--method", opts.method, "bgps or hillclimb (overrides the config)")
      ->check(CLI::IsMember({"bgps", "hillclimb"}));

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = opts.config.empty() ? RunConfig{} : swimopt::harness::load_config(opts.config);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.method) cfg.optimize.method = *opts.method;
    for (auto& e : entries) {
      if (!e.sub->parsed()) continue;
      const auto summary = e.run(cfg, opts.out);
      std::cout << summary.dump(2) << "\n";
    }
  } catch (const swimopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
