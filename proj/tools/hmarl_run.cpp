// Copyright 2026 The hmarl Authors.
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
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hmarl/hmarl.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Runs config-driven multi-agent model-based planning experiments and "
      "emits per-round CSV metrics plus a JSON summary per seed."};
  std::string config_path;
  app.add_option("--config", config_path, "Path to the JSON experiment config")
      ->required();
  std::string out_dir;
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  std::uint64_t seed = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "Single master seed (overrides the config)");
  std::string planner;
  app.add_option("--planner", planner,
                 "Planner override: hmarl, predmean, or oracle");
  int threads = -1;
  app.add_option("--threads", threads,
                 "Within-round worker threads; 0 uses all cores");
  bool parallel_seeds = false;
  app.add_flag("--parallel-seeds", parallel_seeds,
               "Run the configured seeds concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  hmarl::ExperimentConfig cfg;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw hmarl::ConfigError("cannot read config: " + config_path);
    std::ostringstream text;
    text << in.rdbuf();
    cfg = hmarl::parse_config(text.str());

    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_opt->count() > 0) cfg.seeds = {seed};
    if (!planner.empty()) {
      if (planner == "hmarl") {
        cfg.planner = hmarl::PlannerKind::kHMarl;
      } else if (planner == "predmean") {
        cfg.planner = hmarl::PlannerKind::kPredMean;
      } else if (planner == "oracle") {
        cfg.planner = hmarl::PlannerKind::kOracle;
      } else {
        throw hmarl::ConfigError("planner must be one of hmarl|predmean|oracle");
      }
    }
    if (threads >= 0) cfg.threads = threads;
    if (parallel_seeds) cfg.parallel_seeds = true;
  } catch (const hmarl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  return hmarl::run_main(cfg);
}
