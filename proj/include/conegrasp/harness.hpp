// Copyright 2026 The conegrasp Authors
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

#ifndef CONEGRASP_HARNESS_HPP_
#define CONEGRASP_HARNESS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "conegrasp/scenario.hpp"

namespace conegrasp {

inline constexpr double kSlipThreshold = 5e-3;       // m
inline constexpr double kRotationThreshold = 0.15;   // rad

// Per-tick record of the transport stage. Force columns hold one entry per
// finger slot; fingers outside the grasp read zero.
struct TraceRow {
  double time = 0.0;
  std::vector<Vec3> f_real;    // local (n, d, c)
  std::vector<Vec3> f_target;  // local (n, d, c)
  double mu_tilde = 0.0;
  Vec3 g_tilde = Vec3::Zero();
  std::vector<double> gamma_low;
  std::string status;          // optimal, max_iters, infeasible, failed or heuristic
  double slip = 0.0;
  double rotation = 0.0;
};

struct Trace {
  int num_fingers = 0;
  std::vector<TraceRow> rows;
};

struct RunMetrics {
  bool success = false;
  double f_max_over_g = 0.0;  // per-contact peak force over the final weight
  double g_ratio = 0.0;       // final-second mean |G~| over the final weight
  double mu_ratio = 0.0;      // final-second mean mu~ over mu_true
  double max_slip = 0.0;
  double max_rotation = 0.0;
};

// Pure function of the trace. Throws std::invalid_argument when empty.
RunMetrics compute_metrics(const Trace& trace, double mass, double mu_true,
                           double contact_threshold = kDefaultMinNormal);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<ControlMode> mode;
  std::optional<double> eta;
};

struct RunResult {
  RunMetrics metrics;
  Trace trace;
  bool completed = false;       // false when the run aborted
  std::string failure_reason;   // set when the run aborted or failed to grasp
  std::vector<int> contact_fingers;
  double grasp_time = 0.0;      // simulated time at grasp completion
  std::vector<double> total_commanded_normal;  // per tick
};

// Grasp stage then transport stage. Never throws for simulation problems;
// they are reported through `completed` and `failure_reason`.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

Scenario with_options(Scenario scenario, const RunOptions& options);

// Fixed column order; doubles printed with 17 significant digits.
std::string trace_to_csv(const Trace& trace);
Trace trace_from_csv(const std::string& csv);
void write_trace_csv(const Trace& trace, const std::string& path);

struct ScenarioSummary {
  std::string name;
  std::string category;
  std::string mode;
  int repeats = 0;
  double success_fraction = 0.0;
  double mean_f_max_over_g = 0.0;
  double mean_g_ratio = 0.0;
  double mean_mu_ratio = 0.0;
  std::vector<RunMetrics> trials;
};

struct CategorySummary {
  std::string category;
  std::string mode;
  int scenarios = 0;
  double success_fraction = 0.0;
  double mean_f_max_over_g = 0.0;
};

struct BatchSummary {
  std::vector<ScenarioSummary> scenarios;
  std::vector<CategorySummary> categories;
};

// Repeat r of a scenario runs with seed scenario.seed + r. Work is spread
// over `parallelism` threads; results are reduced in input order.
BatchSummary run_batch(const std::vector<Scenario>& scenarios, int repeats, int parallelism,
                       const std::vector<ControlMode>& modes = {});
std::string summary_to_json(const BatchSummary& summary);

}  // namespace conegrasp

#endif  // CONEGRASP_HARNESS_HPP_
