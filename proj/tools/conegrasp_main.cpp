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

// Command-line front end: single runs, batch sweeps and the property suite.
//
// Exit codes: 0 success, 1 run failure (aborted run, unsuccessful transport or
// a failed property check), 2 validation error (bad arguments or scenario).
// CONEGRASP_LOG=quiet|info|debug controls stderr chatter; nothing else is read
// from the environment.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "conegrasp/checks.hpp"
#include "conegrasp/harness.hpp"
#include "conegrasp/scenario.hpp"

namespace {

namespace fs = std::filesystem;
using conegrasp::ControlMode;

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitValidation = 2;

enum class LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("CONEGRASP_LOG");
  if (env == nullptr) return LogLevel::kInfo;
  const std::string v = env;
  if (v == "quiet" || v == "0") return LogLevel::kQuiet;
  if (v == "debug" || v == "2") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

void log(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) <= static_cast<int>(log_level())) std::cerr << msg << "\n";
}

// The message already lists every violation, one per line.
void report_scenario_error(const conegrasp::ScenarioError& e) {
  std::cerr << "validation error: " << e.what() << "\n";
}

nlohmann::ordered_json metrics_json(const conegrasp::RunResult& result) {
  const conegrasp::RunMetrics& m = result.metrics;
  nlohmann::ordered_json j;
  j["completed"] = result.completed;
  if (!result.failure_reason.empty()) j["failure_reason"] = result.failure_reason;
  j["success"] = m.success;
  j["f_max_over_g"] = m.f_max_over_g;
  j["g_ratio"] = m.g_ratio;
  j["mu_ratio"] = m.mu_ratio;
  j["max_slip"] = m.max_slip;
  j["max_rotation"] = m.max_rotation;
  j["contacts"] = result.contact_fingers;
  j["grasp_time"] = result.grasp_time;
  j["ticks"] = result.trace.rows.size();
  return j;
}

std::vector<fs::path> scenario_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (entry.path().filename().string().ends_with(".schema.json")) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_run(const std::string& path, const std::optional<std::uint64_t>& seed,
            const std::string& out, const std::string& mode, const std::optional<double>& eta) {
  conegrasp::Scenario scenario;
  conegrasp::RunOptions options;
  try {
    scenario = conegrasp::load_scenario(path);
    options.seed = seed;
    if (!mode.empty()) options.mode = conegrasp::parse_mode(mode);
    if (eta && !(*eta > 0.0)) throw std::invalid_argument("--eta must be positive");
    options.eta = eta;
  } catch (const conegrasp::ScenarioError& e) {
    report_scenario_error(e);
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  }

  log(LogLevel::kInfo, "running " + scenario.name);
  const conegrasp::RunResult result = conegrasp::run(scenario, options);
  if (!out.empty()) {
    conegrasp::write_trace_csv(result.trace, out);
    log(LogLevel::kInfo, "trace written to " + out);
  }
  std::cout << metrics_json(result).dump(2) << "\n";
  if (!result.completed) {
    log(LogLevel::kQuiet, "run failed: " + result.failure_reason);
    return kExitRunFailure;
  }
  return result.metrics.success ? kExitOk : kExitRunFailure;
}

int cmd_batch(const std::string& dir, int repeats, const std::string& out, int parallel,
              const std::vector<std::string>& mode_names) {
  if (!fs::is_directory(dir)) {
    std::cerr << "validation error: " << dir << " is not a directory\n";
    return kExitValidation;
  }
  std::vector<conegrasp::Scenario> scenarios;
  std::vector<ControlMode> modes;
  try {
    for (const fs::path& p : scenario_files(dir)) {
      log(LogLevel::kDebug, "loading " + p.string());
      scenarios.push_back(conegrasp::load_scenario(p.string()));
    }
    for (const std::string& m : mode_names) modes.push_back(conegrasp::parse_mode(m));
  } catch (const conegrasp::ScenarioError& e) {
    report_scenario_error(e);
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  }
  if (scenarios.empty()) {
    std::cerr << "validation error: no scenario files under " << dir << "\n";
    return kExitValidation;
  }
  if (parallel <= 0) parallel = std::max(1u, std::thread::hardware_concurrency());
  log(LogLevel::kInfo, "batch: " + std::to_string(scenarios.size()) + " scenarios x " +
                           std::to_string(repeats) + " repeats on " + std::to_string(parallel) +
                           " threads");

  const conegrasp::BatchSummary summary = conegrasp::run_batch(scenarios, repeats, parallel, modes);
  const std::string json = conegrasp::summary_to_json(summary);
  if (out.empty()) {
    std::cout << json << "\n";
  } else {
    std::ofstream f(out, std::ios::binary);
    f << json << "\n";
    if (!f) {
      std::cerr << "cannot write " << out << "\n";
      return kExitRunFailure;
    }
  }
  for (const conegrasp::CategorySummary& c : summary.categories) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %-8s scenarios=%d success=%.2f f_max/G=%.3f",
                  c.category.c_str(), c.mode.c_str(), c.scenarios, c.success_fraction,
                  c.mean_f_max_over_g);
    log(LogLevel::kInfo, line);
  }
  return kExitOk;
}

int cmd_verify(std::uint64_t seed) {
  bool ok = true;
  for (const conegrasp::CheckResult& r : conegrasp::run_property_suite(seed)) {
    std::cout << conegrasp::format_check(r) << "\n";
    ok = ok && r.passed;
  }
  std::cout << (ok ? "all properties hold" : "property violations found") << "\n";
  return ok ? kExitOk : kExitRunFailure;
}

int cmd_lemma(int samples, std::uint64_t seed) {
  const conegrasp::CheckResult r = conegrasp::check_rotational_slip_lemma(samples, seed);
  std::cout << conegrasp::format_check(r) << "\n";
  return r.passed ? kExitOk : kExitRunFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Friction-cone contact force allocation with a closed-loop grasp simulator"};
  app.require_subcommand(1);

  std::string run_path, run_out, run_mode;
  std::optional<std::uint64_t> run_seed;
  std::optional<double> run_eta;
  CLI::App* run = app.add_subcommand("run", "Run one scenario and print its metrics");
  run->add_option("scenario", run_path, "Scenario JSON file")->required();
  run->add_option("--seed", run_seed, "Override the scenario seed");
  run->add_option("--out", run_out, "Write the per-tick trace CSV here");
  run->add_option("--mode", run_mode, "Controller mode")
      ->check(CLI::IsMember({"full", "no_pid", "no_socp"}));
  run->add_option("--eta", run_eta, "Force gain of the no_socp heuristic");

  std::string batch_dir, batch_out;
  int batch_repeats = 5;
  int batch_parallel = 0;
  std::vector<std::string> batch_modes;
  CLI::App* batch = app.add_subcommand("batch", "Run every scenario under a directory");
  batch->add_option("dir", batch_dir, "Directory searched recursively for *.json")->required();
  batch->add_option("--repeats", batch_repeats, "Seeded trials per scenario")
      ->check(CLI::PositiveNumber);
  batch->add_option("--out", batch_out, "Summary JSON path (stdout when omitted)");
  batch->add_option("--parallel", batch_parallel, "Worker threads (0 = all cores)");
  batch->add_option("--modes", batch_modes,
                    "Run each scenario under these modes instead of its own")
      ->delimiter(',')
      ->check(CLI::IsMember({"full", "no_pid", "no_socp"}));

  std::uint64_t verify_seed = 20240601;
  CLI::App* verify = app.add_subcommand("verify", "Run the randomized property suite");
  verify->add_option("--seed", verify_seed, "Sampler seed");

  int lemma_samples = 10000;
  std::uint64_t lemma_seed = 7;
  CLI::App* lemma = app.add_subcommand("lemma", "Check the rotational slip lemma on random triples");
  lemma->add_option("--samples", lemma_samples, "Number of random triples")
      ->check(CLI::PositiveNumber);
  lemma->add_option("--seed", lemma_seed, "Sampler seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run) return cmd_run(run_path, run_seed, run_out, run_mode, run_eta);
    if (*batch) return cmd_batch(batch_dir, batch_repeats, batch_out, batch_parallel, batch_modes);
    if (*verify) return cmd_verify(verify_seed);
    if (*lemma) return cmd_lemma(lemma_samples, lemma_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailure;
  }
  return kExitValidation;
}
