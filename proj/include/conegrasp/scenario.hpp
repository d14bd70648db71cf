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

#ifndef CONEGRASP_SCENARIO_HPP_
#define CONEGRASP_SCENARIO_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conegrasp/force_controller.hpp"
#include "conegrasp/grasp_sim.hpp"
#include "conegrasp/hand_model.hpp"

namespace conegrasp {

// Palm offset reached at `time` seconds after the hold phase starts.
struct Waypoint {
  double time = 0.0;
  Vec3 offset = Vec3::Zero();
};

// Palm oscillation whose acceleration is amplitude * cos(2 pi f t) along
// `axis`, starting at rest.
struct ShakeSpec {
  double amplitude = 0.5 * kGravity;  // m/s^2
  double frequency = 2.0;             // Hz
  Vec3 axis = Vec3::UnitZ();
  double start = 0.0;                 // s after the hold phase starts
  double duration = 5.0;              // s
};

// Palm motion during the transport stage, times relative to grasp completion:
// settle in place, minimum-jerk lift, then hold while following `path` and
// `shake`.
struct TransportSpec {
  double settle_time = 0.2;
  double lift_height = 0.10;
  double lift_duration = 2.5;
  double hold_time = 5.0;
  std::vector<Waypoint> path;
  std::optional<ShakeSpec> shake;

  double total_time() const { return settle_time + lift_duration + hold_time; }
  double hold_start() const { return settle_time + lift_duration; }
  // Palm offset from its grasp-completion position.
  Vec3 palm_offset(double t) const;
};

struct SimConfig {
  double dt = 1e-3;
  int steps_per_tick = 33;
  double servo_time_constant = 0.02;  // s
  double tactile_noise = 0.0;         // N, per component
  double pre_settle_time = 0.1;       // s before the grasp stage
  SimParams params;
};

struct Scenario {
  std::string name;
  std::string category;
  ObjectSpec object;
  Vec3 object_xy = Vec3::Zero();
  HandKinematics hand;
  VecX q_pregrasp;
  VecX delta_q_grasp;
  int n1 = 60;
  int n2 = 1;
  TransportSpec transport;
  DisturbanceProfile disturbances;  // times relative to grasp completion
  ControllerConfig controller;
  SimConfig sim;
  std::uint64_t seed = 0;

  double tick_dt() const { return sim.dt * sim.steps_per_tick; }
  // Object mass after every disturbance inside the transport window.
  double final_mass() const;
};

// Raised for malformed input. `line` is set for syntax errors; `violations`
// lists every semantic problem, each prefixed with the offending field.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& what, std::vector<std::string> violations, int line = 0)
      : std::runtime_error(what), violations_(std::move(violations)), line_(line) {}
  const std::vector<std::string>& violations() const { return violations_; }
  int line() const { return line_; }

 private:
  std::vector<std::string> violations_;
  int line_;
};

// Parses and validates; omitted optional fields take their defaults.
Scenario parse_scenario(const std::string& json_text, const std::string& source = "<string>");
Scenario load_scenario(const std::string& path);

}  // namespace conegrasp

#endif  // CONEGRASP_SCENARIO_HPP_
