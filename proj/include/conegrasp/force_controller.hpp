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

#ifndef CONEGRASP_FORCE_CONTROLLER_HPP_
#define CONEGRASP_FORCE_CONTROLLER_HPP_

#include <span>
#include <string>
#include <vector>

#include "conegrasp/cone_program.hpp"
#include "conegrasp/estimators.hpp"
#include "conegrasp/hand_model.hpp"
#include "conegrasp/socp_solver.hpp"

namespace conegrasp {

// Joint-space PID acting on error torques. Gains are rad per N m; the
// integral is saturated so that |ki * integral| <= integral_limit (rad).
struct PidGains {
  double kp = 2e-3;
  // q_control is an increment on q_current, so kp already integrates the
  // force error once. A non-zero ki stacks a second integrator that keeps
  // loosening or tightening the grip long after the error has vanished.
  double ki = 0.0;
  double kd = 1e-4;
  double dt = 1.0 / 30.0;
  double integral_limit = 0.2;
};

// Throws std::invalid_argument for negative gains, dt <= 0 or a negative
// integral limit.
void validate(const PidGains& gains);

struct ControllerState {
  VecX integral;
  VecX prev_error_torque;
  VecX f_prev;  // previous SOCP solution, stacked local forces
};

ControllerState initial_controller_state(int num_joints, int num_contacts);

enum class ControlMode { kFull, kNoPid, kNoSocp };
std::string to_string(ControlMode mode);
// Throws std::invalid_argument for an unknown name.
ControlMode parse_mode(const std::string& name);

struct ControllerConfig {
  double beta1 = kDefaultBeta1;
  double beta2 = kDefaultBeta2;
  double gamma_up = kDefaultGammaUp;
  PidGains gains;
  EstimatorConfig estimator;
  ControlMode mode = ControlMode::kFull;
  double eta = 2.0;  // force gain of the heuristic allocation
  // Floor applied to the friction estimate before it enters the cone bounds.
  double mu_floor = 0.05;
  // Fingertip stiffness assumed by the open-loop mode to convert target
  // forces into joint offsets (N/m).
  double open_loop_stiffness = 2000.0;
  double contact_threshold = 0.05;  // N
  SolverSettings solver;
};

// tau = J^T (f_target - f_real) with world-frame stacked forces.
VecX error_torque(const MatX& J, const VecX& f_target_world, const VecX& f_real_world);

struct PidResult {
  VecX q_control;
  ControllerState state;
};

// q_control = clamp(q + kp tau + ki I + kd (tau - tau_prev) / dt) with
// I <- saturate(I + tau dt). The first call uses tau_prev = tau.
PidResult pid_step(const ControllerState& state, const PidGains& gains,
                   const VecX& tau, const VecX& q_current, const HandKinematics& hand);

// Moves the joints of every finger whose flag is false by delta_q_grasp.
VecX grasp_close_step(const std::vector<bool>& contact_flags, const VecX& delta_q_grasp,
                      const VecX& q, const HandKinematics& hand);

// Per-finger contact flags from world force magnitudes.
std::vector<bool> contact_flags(std::span<const Vec3> forces_world, double threshold);

// Everything the transport loop carries from one tick to the next.
struct TransportContext {
  HandKinematics hand;
  std::vector<int> contact_fingers;  // finger index for each controlled contact
  ControllerConfig config;
  EstimatorState estimator;
  ControllerState controller;
  VecX q_reference;  // grasp-completion configuration, used by the open-loop mode
  VecX q_last_command;  // returned unchanged when a solve fails
};

TransportContext make_transport_context(const HandKinematics& hand,
                                        std::vector<int> contact_fingers,
                                        const ControllerConfig& config,
                                        const VecX& q_reference);

struct TactileFrame {
  std::vector<ContactFrame> frames;  // one per controlled contact
  std::vector<Vec3> forces;          // local (n, d, c), one per controlled contact
};

struct TransportDiagnostics {
  SolveStatus status = SolveStatus::kOptimal;
  int iterations = 0;
  double max_cone_residual = 0.0;
  bool solver_failed = false;
  std::vector<double> gamma_low;
  std::vector<bool> saturated;
  VecX f_target_local;  // allocation result, stacked local
  double mu_tilde = 0.0;
  Vec3 g_tilde = Vec3::Zero();
  std::vector<std::string> stage_log;
};

struct TransportResult {
  VecX q_control;
  TransportDiagnostics diagnostics;
};

// One control tick: estimator update, adaptive bounds, allocation, tracking.
// Throws std::invalid_argument when fewer than two contacts are controlled.
// On a solver failure the previous command is held and flagged.
TransportResult transport_step(TransportContext& ctx, const TactileFrame& tactile,
                               const VecX& q_current, double a_vertical);

}  // namespace conegrasp

#endif  // CONEGRASP_FORCE_CONTROLLER_HPP_
