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

#ifndef HMARL_OUTPUT_HPP_
#define HMARL_OUTPUT_HPP_

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hmarl/driver.hpp"

namespace hmarl {

/// Fixed 17-significant-digit formatting; round-trips every double and is
/// byte-stable across runs.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

inline std::string rounds_csv(const ExperimentResult& result) {
  const int n = result.true_payoff.values.n_agents();
  std::string out = "round,planner,avg_true_value_under_P";
  for (int i = 0; i < n; ++i) out += ",regret_agent_" + std::to_string(i);
  out += ",eps_t,gap_t,info_cumulative,seconds\n";
  const std::string planner = to_string(result.planner);
  for (std::size_t r = 0; r < result.logs.size(); ++r) {
    const RoundLog& log = result.logs[r];
    out += std::to_string(log.t);
    out += ',';
    out += planner;
    out += ',';
    out += format_g17(log.true_value_under_P.mean());
    for (int i = 0; i < n; ++i) {
      out += ',';
      out += format_g17(result.regret.terms(static_cast<int>(r), i));
    }
    out += ',';
    out += format_g17(log.eps_t);
    out += ',';
    out += format_g17(log.gap_t);
    out += ',';
    out += format_g17(result.information[r]);
    out += ',';
    out += format_g17(log.seconds);
    out += '\n';
  }
  return out;
}

inline nlohmann::json summary_json(const ExperimentResult& result) {
  const int n = result.true_payoff.values.n_agents();
  const int rounds = static_cast<int>(result.logs.size());
  nlohmann::json j;
  j["seed"] = result.master_seed;
  j["planner"] = to_string(result.planner);
  j["rounds"] = rounds;
  j["t_star"] = result.t_star;
  j["gap_at_t_star"] = result.logs[result.t_star - 1].gap_t;
  j["eps_sum"] = result.eps_sum;
  nlohmann::json final_regret = nlohmann::json::array();
  for (int i = 0; i < n; ++i)
    final_regret.push_back(result.regret.cumulative(rounds - 1, i));
  j["final_regret"] = final_regret;
  j["final_avg_true_value"] =
      result.logs.back().true_value_under_P.mean();
  j["true_value_episodes"] = result.true_payoff.episodes;
  j["true_value_deterministic"] = result.true_payoff.deterministic;
  double max_se = 0.0;
  for (int i = 0; i < n; ++i)
    max_se = std::max(max_se,
                      result.true_payoff.std_error.agent_values(i).maxCoeff());
  j["true_value_std_error_max"] = max_se;
  return j;
}

/// Full round-by-round serialization, used to re-derive every summary
/// quantity from the serialized form.
inline nlohmann::json result_json(const ExperimentResult& result) {
  const int n = result.true_payoff.values.n_agents();
  nlohmann::json j = summary_json(result);
  nlohmann::json rounds = nlohmann::json::array();
  for (std::size_t r = 0; r < result.logs.size(); ++r) {
    const RoundLog& log = result.logs[r];
    nlohmann::json row;
    row["t"] = log.t;
    row["eps_t"] = log.eps_t;
    row["gap_t"] = log.gap_t;
    row["sigma_sq_increment"] = log.sigma_sq_increment;
    row["sampled"] = log.sampled;
    nlohmann::json tv = nlohmann::json::array();
    for (int i = 0; i < n; ++i) tv.push_back(log.true_value_under_P(i));
    row["true_value_under_P"] = tv;
    nlohmann::json mixed = nlohmann::json::array();
    for (int f = 0; f < log.mixed.size(); ++f)
      mixed.push_back(log.mixed.probs()(f));
    row["mixed"] = mixed;
    nlohmann::json ucb = nlohmann::json::array();
    nlohmann::json lcb = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
      nlohmann::json ui = nlohmann::json::array();
      nlohmann::json li = nlohmann::json::array();
      for (int f = 0; f < log.ucb_tensor.n_profiles(); ++f) {
        ui.push_back(log.ucb_tensor.value(i, f));
        li.push_back(log.lcb_tensor.value(i, f));
      }
      ucb.push_back(ui);
      lcb.push_back(li);
    }
    row["ucb"] = ucb;
    row["lcb"] = lcb;
    rounds.push_back(row);
  }
  j["rounds_log"] = rounds;
  nlohmann::json info = nlohmann::json::array();
  for (double v : result.information) info.push_back(v);
  j["information"] = info;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
  if (!out) throw std::runtime_error("cannot write file: " + path);
}

}  // namespace hmarl

#endif  // HMARL_OUTPUT_HPP_
