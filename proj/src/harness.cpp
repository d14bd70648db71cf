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

#include "conegrasp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include <json.hpp>

namespace conegrasp {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Palm motion during transport. The arm tracks the trajectory smoothly;
// commands reach the hand controller every `interval` seconds.
class PalmCommand {
 public:
  PalmCommand(const TransportSpec& spec, double interval) : spec_(spec), interval_(interval) {}

  Vec3 offset(double t) const { return spec_.palm_offset(t); }

  // Central second difference of the commanded height.
  double vertical_accel(double t) const {
    const double h = interval_;
    const double c = std::floor(t / h + 1e-9) * h;
    const double z0 = spec_.palm_offset(std::max(0.0, c - h)).z();
    const double z1 = spec_.palm_offset(c).z();
    const double z2 = spec_.palm_offset(c + h).z();
    return (z2 - 2.0 * z1 + z0) / (h * h);
  }

 private:
  const TransportSpec& spec_;
  double interval_;
};

}  // namespace

Scenario with_options(Scenario scenario, const RunOptions& options) {
  if (options.seed) scenario.seed = *options.seed;
  if (options.mode) scenario.controller.mode = *options.mode;
  if (options.eta) scenario.controller.eta = *options.eta;
  return scenario;
}

RunMetrics compute_metrics(const Trace& trace, double mass, double mu_true,
                           double contact_threshold) {
  if (trace.rows.empty()) throw std::invalid_argument("compute_metrics: empty trace");
  if (!(mass > 0.0) || !(mu_true > 0.0)) {
    throw std::invalid_argument("compute_metrics: mass and mu_true must be positive");
  }
  const double weight = mass * kGravity;
  RunMetrics m;
  double f_max = 0.0;
  for (const TraceRow& row : trace.rows) {
    for (const Vec3& f : row.f_real) f_max = std::max(f_max, f.norm());
    m.max_slip = std::max(m.max_slip, row.slip);
    m.max_rotation = std::max(m.max_rotation, row.rotation);
  }
  m.f_max_over_g = f_max / weight;

  const double t_end = trace.rows.back().time;
  double g_sum = 0.0, mu_sum = 0.0;
  int count = 0;
  for (const TraceRow& row : trace.rows) {
    if (row.time < t_end - 1.0) continue;
    g_sum += row.g_tilde.norm();
    mu_sum += row.mu_tilde;
    ++count;
  }
  m.g_ratio = g_sum / count / weight;
  m.mu_ratio = mu_sum / count / mu_true;

  bool held = false;
  for (const Vec3& f : trace.rows.back().f_real) held = held || f[0] >= contact_threshold;
  m.success = held && m.max_slip < kSlipThreshold && m.max_rotation < kRotationThreshold;
  return m;
}

RunResult run(const Scenario& input, const RunOptions& options) {
  const Scenario sc = with_options(input, options);
  RunResult result;
  ObjectSpec object = sc.object;
  HandKinematics hand = sc.hand;
  const SimConfig& cfg = sc.sim;
  const int F = hand.num_fingers();
  const double tick = sc.tick_dt();
  const double servo_alpha = 1.0 - std::exp(-cfg.dt / cfg.servo_time_constant);
  const Vec3 palm_start = hand.palm_pose.position;

  result.trace.num_fingers = F;
  try {
    validate(object);
    validate(hand);
    validate(sc.controller.gains);

    SimState state = initial_state(object, cfg.params, F, sc.object_xy);
    TactileSensor sensor(cfg.tactile_noise, sc.seed);
    VecX q_cmd = clamp_joints(hand, sc.q_pregrasp);
    VecX q_act = q_cmd;

    // Advances the simulation by `steps` steps. `transport_t` is the time
    // since grasp completion, or negative before it.
    auto advance = [&](int steps, double transport_t, const PalmCommand* palm) {
      for (int s = 0; s < steps; ++s) {
        q_act += servo_alpha * (q_cmd - q_act);
        Vec3 ext = Vec3::Zero();
        if (palm) {
          const double t_next = transport_t + (s + 1) * cfg.dt;
          hand.palm_pose.position = palm_start + palm->offset(t_next);
          ext = apply_disturbance(sc.disturbances, t_next - cfg.dt, t_next, object);
        }
        const std::vector<Vec3> tips = forward_kinematics(hand, q_act);
        state = sim_step(state, object, cfg.params, tips, ext, cfg.dt);
      }
    };

    advance(static_cast<int>(std::lround(cfg.pre_settle_time / cfg.dt)), -1.0, nullptr);

    // Grasp stage: close every finger that has not touched yet.
    std::vector<bool> flags(static_cast<std::size_t>(F), false);
    auto read_flags = [&]() {
      const std::vector<ContactFrame> frames = contact_frames(state);
      const std::vector<Vec3> local = sensor.read(state, frames);
      std::vector<Vec3> world;
      for (int i = 0; i < F; ++i) world.push_back(local_to_world(frames[i], local[i]));
      return std::make_pair(contact_flags(world, sc.controller.contact_threshold), local);
    };
    std::vector<Vec3> grasp_readings;
    for (int k = 0; k < sc.n1; ++k) {
      std::tie(flags, grasp_readings) = read_flags();
      if (std::all_of(flags.begin(), flags.end(), [](bool b) { return b; })) break;
      q_cmd = grasp_close_step(flags, sc.delta_q_grasp, q_cmd, hand);
      advance(cfg.steps_per_tick, -1.0, nullptr);
    }
    std::tie(flags, grasp_readings) = read_flags();
    for (int i = 0; i < F; ++i) {
      if (flags[i]) result.contact_fingers.push_back(i);
    }
    result.grasp_time = state.time;
    if (result.contact_fingers.size() < 2) {
      result.failure_reason = "grasp stage ended with " +
                              std::to_string(result.contact_fingers.size()) + " contact(s)";
      return result;
    }
    mark_grasp_complete(state);

    TransportContext ctx =
        make_transport_context(hand, result.contact_fingers, sc.controller, q_cmd);
    const int m = static_cast<int>(result.contact_fingers.size());
    for (int i = 0; i < m; ++i) {
      ctx.controller.f_prev.segment<3>(3 * i) = grasp_readings[result.contact_fingers[i]];
    }

    const PalmCommand palm(sc.transport, sc.n2 * tick);
    const int ticks = static_cast<int>(std::lround(sc.transport.total_time() / tick));
    for (int k = 0; k < ticks; ++k) {
      const double t = k * tick;
      const std::vector<ContactFrame> frames = contact_frames(state);
      const std::vector<Vec3> readings = sensor.read(state, frames);
      TactileFrame tactile;
      for (int f : result.contact_fingers) {
        tactile.frames.push_back(frames[f]);
        tactile.forces.push_back(readings[f]);
      }
      ctx.hand.palm_pose = hand.palm_pose;
      const TransportResult step =
          transport_step(ctx, tactile, q_act, palm.vertical_accel(t));
      q_cmd = step.q_control;

      const TransportDiagnostics& d = step.diagnostics;
      TraceRow row;
      row.time = t;
      row.f_real.assign(static_cast<std::size_t>(F), Vec3::Zero());
      row.f_target.assign(static_cast<std::size_t>(F), Vec3::Zero());
      row.gamma_low.assign(static_cast<std::size_t>(F), 0.0);
      double total_normal = 0.0;
      for (int i = 0; i < m; ++i) {
        const int f = result.contact_fingers[i];
        row.f_real[f] = readings[f];
        row.f_target[f] = d.f_target_local.segment<3>(3 * i);
        row.gamma_low[f] = d.gamma_low[i];
        total_normal += d.f_target_local[3 * i];
      }
      row.mu_tilde = d.mu_tilde;
      row.g_tilde = d.g_tilde;
      if (d.solver_failed) row.status = "failed";
      else if (sc.controller.mode == ControlMode::kNoSocp) row.status = "heuristic";
      else row.status = std::string(to_string(d.status));
      const SlipReport slip = detect_slip(state);
      row.slip = slip.max_translational_slip;
      row.rotation = slip.rotation_angle;
      result.trace.rows.push_back(std::move(row));
      result.total_commanded_normal.push_back(total_normal);

      advance(cfg.steps_per_tick, t, &palm);
    }
    result.completed = true;
    result.metrics = compute_metrics(result.trace, sc.final_mass(), object.mu_true,
                                     sc.controller.estimator.min_normal);
    if (!result.metrics.success) result.failure_reason = "success criteria not met";
  } catch (const std::exception& e) {
    result.completed = false;
    result.failure_reason = e.what();
    if (!result.trace.rows.empty()) {
      result.metrics = compute_metrics(result.trace, sc.final_mass(), sc.object.mu_true);
      result.metrics.success = false;
    }
  }
  return result;
}

std::string trace_to_csv(const Trace& trace) {
  const int F = trace.num_fingers;
  std::ostringstream out;
  out << "time";
  for (const char* group : {"f_real", "f_target"}) {
    for (int i = 0; i < F; ++i) {
      for (const char* axis : {"n", "d", "c"}) out << ',' << group << '_' << axis << '_' << i;
    }
  }
  out << ",mu_tilde,g_tilde_x,g_tilde_y,g_tilde_z";
  for (int i = 0; i < F; ++i) out << ",gamma_low_" << i;
  out << ",status,slip,rotation\n";
  for (const TraceRow& r : trace.rows) {
    out << format_double(r.time);
    for (const std::vector<Vec3>* group : {&r.f_real, &r.f_target}) {
      for (int i = 0; i < F; ++i) {
        for (int k = 0; k < 3; ++k) out << ',' << format_double((*group)[i][k]);
      }
    }
    out << ',' << format_double(r.mu_tilde);
    for (int k = 0; k < 3; ++k) out << ',' << format_double(r.g_tilde[k]);
    for (int i = 0; i < F; ++i) out << ',' << format_double(r.gamma_low[i]);
    out << ',' << r.status << ',' << format_double(r.slip) << ',' << format_double(r.rotation)
        << '\n';
  }
  return out.str();
}

Trace trace_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("trace csv: missing header");
  const auto header_cols = std::count(line.begin(), line.end(), ',') + 1;
  // time + 6F force columns + 4 estimate columns + F bounds + 3 tail columns.
  const auto F = (header_cols - 8) / 7;
  if (F < 1 || 7 * F + 8 != header_cols) {
    throw std::invalid_argument("trace csv: unexpected column count");
  }
  Trace trace;
  trace.num_fingers = static_cast<int>(F);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<long>(cells.size()) != header_cols) {
      throw std::invalid_argument("trace csv: ragged row");
    }
    std::size_t c = 0;
    auto num = [&]() { return std::strtod(cells[c++].c_str(), nullptr); };
    TraceRow r;
    r.time = num();
    for (std::vector<Vec3>* group : {&r.f_real, &r.f_target}) {
      for (long i = 0; i < F; ++i) {
        Vec3 v;
        for (int k = 0; k < 3; ++k) v[k] = num();
        group->push_back(v);
      }
    }
    r.mu_tilde = num();
    for (int k = 0; k < 3; ++k) r.g_tilde[k] = num();
    for (long i = 0; i < F; ++i) r.gamma_low.push_back(num());
    r.status = cells[c++];
    r.slip = num();
    r.rotation = num();
    trace.rows.push_back(std::move(r));
  }
  return trace;
}

void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << trace_to_csv(trace);
}

BatchSummary run_batch(const std::vector<Scenario>& scenarios, int repeats, int parallelism,
                       const std::vector<ControlMode>& modes) {
  if (scenarios.empty()) throw std::invalid_argument("run_batch: no scenarios");
  if (repeats < 1) throw std::invalid_argument("run_batch: repeats must be at least 1");
  parallelism = std::max(1, parallelism);

  struct Job {
    std::size_t scenario;
    ControlMode mode;
    int repeat;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    std::vector<ControlMode> ms = modes;
    if (ms.empty()) ms.push_back(scenarios[s].controller.mode);
    for (ControlMode mode : ms) {
      for (int r = 0; r < repeats; ++r) jobs.push_back({s, mode, r});
    }
  }
  std::vector<RunMetrics> results(jobs.size());
  auto work = [&](std::size_t j) {
    const Job& job = jobs[j];
    RunOptions opt;
    opt.mode = job.mode;
    opt.seed = scenarios[job.scenario].seed + static_cast<std::uint64_t>(job.repeat);
    results[j] = run(scenarios[job.scenario], opt).metrics;
  };
  for (std::size_t start = 0; start < jobs.size(); start += static_cast<std::size_t>(parallelism)) {
    const std::size_t end = std::min(jobs.size(), start + static_cast<std::size_t>(parallelism));
    std::vector<std::future<void>> wave;
    for (std::size_t j = start + 1; j < end; ++j) {
      wave.push_back(std::async(std::launch::async, work, j));
    }
    work(start);
    for (auto& f : wave) f.get();
  }

  BatchSummary summary;
  for (std::size_t j = 0; j < jobs.size(); j += static_cast<std::size_t>(repeats)) {
    const Scenario& sc = scenarios[jobs[j].scenario];
    ScenarioSummary s;
    s.name = sc.name;
    s.category = sc.category;
    s.mode = to_string(jobs[j].mode);
    s.repeats = repeats;
    for (int r = 0; r < repeats; ++r) {
      const RunMetrics& m = results[j + static_cast<std::size_t>(r)];
      s.trials.push_back(m);
      s.success_fraction += m.success ? 1.0 : 0.0;
      s.mean_f_max_over_g += m.f_max_over_g;
      s.mean_g_ratio += m.g_ratio;
      s.mean_mu_ratio += m.mu_ratio;
    }
    s.success_fraction /= repeats;
    s.mean_f_max_over_g /= repeats;
    s.mean_g_ratio /= repeats;
    s.mean_mu_ratio /= repeats;
    summary.scenarios.push_back(std::move(s));
  }
  for (const ScenarioSummary& s : summary.scenarios) {
    auto it = std::find_if(summary.categories.begin(), summary.categories.end(),
                           [&](const CategorySummary& c) {
                             return c.category == s.category && c.mode == s.mode;
                           });
    if (it == summary.categories.end()) {
      summary.categories.push_back({s.category, s.mode, 0, 0.0, 0.0});
      it = summary.categories.end() - 1;
    }
    it->scenarios += 1;
    it->success_fraction += s.success_fraction;
    it->mean_f_max_over_g += s.mean_f_max_over_g;
  }
  for (CategorySummary& c : summary.categories) {
    c.success_fraction /= c.scenarios;
    c.mean_f_max_over_g /= c.scenarios;
  }
  return summary;
}

std::string summary_to_json(const BatchSummary& summary) {
  nlohmann::ordered_json root;
  root["f_max_over_g_definition"] = "per-contact peak force magnitude divided by final weight";
  root["scenarios"] = nlohmann::ordered_json::array();
  for (const ScenarioSummary& s : summary.scenarios) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["category"] = s.category;
    j["mode"] = s.mode;
    j["repeats"] = s.repeats;
    j["success_fraction"] = s.success_fraction;
    j["mean_f_max_over_g"] = s.mean_f_max_over_g;
    j["mean_g_ratio"] = s.mean_g_ratio;
    j["mean_mu_ratio"] = s.mean_mu_ratio;
    j["trials"] = nlohmann::ordered_json::array();
    for (const RunMetrics& m : s.trials) {
      j["trials"].push_back({{"success", m.success},
                             {"f_max_over_g", m.f_max_over_g},
                             {"g_ratio", m.g_ratio},
                             {"mu_ratio", m.mu_ratio},
                             {"max_slip", m.max_slip},
                             {"max_rotation", m.max_rotation}});
    }
    root["scenarios"].push_back(j);
  }
  root["categories"] = nlohmann::ordered_json::array();
  for (const CategorySummary& c : summary.categories) {
    root["categories"].push_back({{"category", c.category},
                                  {"mode", c.mode},
                                  {"scenarios", c.scenarios},
                                  {"success_fraction", c.success_fraction},
                                  {"mean_f_max_over_g", c.mean_f_max_over_g}});
  }
  return root.dump(2) + "\n";
}

}  // namespace conegrasp
