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

#ifndef HMARL_RUNNER_HPP_
#define HMARL_RUNNER_HPP_

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hmarl/config.hpp"
#include "hmarl/driver.hpp"
#include "hmarl/output.hpp"
#include "hmarl/parallel.hpp"

namespace hmarl {

inline std::string rounds_csv_path(const ExperimentConfig& cfg,
                                   std::uint64_t seed) {
  return (std::filesystem::path(cfg.out_dir) /
          ("rounds_" + std::to_string(seed) + ".csv"))
      .string();
}

inline std::string summary_json_path(const ExperimentConfig& cfg,
                                     std::uint64_t seed) {
  return (std::filesystem::path(cfg.out_dir) /
          ("summary_" + std::to_string(seed) + ".json"))
      .string();
}

/// Runs every configured seed and writes rounds_<seed>.csv plus
/// summary_<seed>.json into cfg.out_dir. Returns 0 on success, 1 on a config
/// error, 2 on any runtime failure. Files already written by this call are
/// removed if a later seed fails, so the output directory never holds a
/// partial result set.
inline int run_main(const ExperimentConfig& cfg, std::ostream& err = std::cerr) {
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }

  std::vector<std::string> written;
  try {
    const int n_seeds = static_cast<int>(cfg.seeds.size());
    std::vector<std::optional<ExperimentResult>> results(n_seeds);
    if (cfg.parallel_seeds && n_seeds > 1) {
      parallel_for(n_seeds, n_seeds, [&](int k) {
        results[k] = run_experiment(cfg, cfg.seeds[k]);
      });
    } else {
      for (int k = 0; k < n_seeds; ++k)
        results[k] = run_experiment(cfg, cfg.seeds[k]);
    }

    std::filesystem::create_directories(cfg.out_dir);
    for (int k = 0; k < n_seeds; ++k) {
      const std::uint64_t seed = cfg.seeds[k];
      const std::string csv_path = rounds_csv_path(cfg, seed);
      write_text_file(csv_path, rounds_csv(*results[k]));
      written.push_back(csv_path);
      const std::string json_path = summary_json_path(cfg, seed);
      write_text_file(json_path, summary_json(*results[k]).dump(2) + "\n");
      written.push_back(json_path);
    }
  } catch (const std::exception& e) {
    for (const std::string& path : written) {
      std::error_code ec;
      std::filesystem::remove(path, ec);
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace hmarl

#endif  // HMARL_RUNNER_HPP_
