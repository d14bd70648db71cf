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

#include "conegrasp/force_controller.hpp"

#include <algorithm>
#include <cmath>

namespace conegrasp {

void validate(const PidGains& gains) {
  if (!(gains.kp >= 0.0) || !(gains.ki >= 0.0) || !(gains.kd >= 0.0)) {
    throw std::invalid_argument("controller.gains: kp, ki, kd must be non-negative");
  }
  if (!(gains.dt > 0.0)) throw std::invalid_argument("controller.gains.dt: must be positive");
  if (!(gains.integral_limit >= 0.0)) {
    throw std::invalid_argument("controller.gains.integral_limit: must be non-negative");
  }
}

ControllerState initial_controller_state(int num_joints, int num_contacts) {
  ControllerState s;
  s.integral = VecX::Zero(num_joints);
  s.prev_error_torque.resize(0);
  s.f_prev = VecX::Zero(3 * num_contacts);
  return s;
}

std::string to_string(ControlMode mode) {
  switch (mode) {
    case ControlMode::kFull:
      return "full";
    case ControlMode::kNoPid:
      return "no_pid";
    case ControlMode::kNoSocp:
      return "no_socp";
  }
  return "full";
}

ControlMode parse_mode(const std::string& name) {
  if (name == "full") return ControlMode::kFull;
  if (name == "no_pid") return ControlMode::kNoPid;
  if (name == "no_socp") return ControlMode::kNoSocp;
  throw std::invalid_argument("unknown mode '" + name + "' (expected full, no_pid or no_socp)");
}

VecX error_torque(const MatX& J, const VecX& f_target_world, const VecX& f_real_world) {
  if (f_target_world.size() != J.rows() || f_real_world.size() != J.rows()) {
    throw std::invalid_argument("error_torque: force vectors must match the Jacobian rows");
  }
  return J.transpose() * (f_target_world - f_real_world);
}

PidResult pid_step(const ControllerState& state, const PidGains& gains,
                   const VecX& tau, const VecX& q_current, const HandKinematics& hand) {
  if (tau.size() != q_current.size() || state.integral.size() != tau.size()) {
    throw std::invalid_argument("pid_step: dimension mismatch");
  }
  PidResult out;
  out.state = state;
  VecX integral = state.integral + tau * gains.dt;
  if (gains.ki > 0.0) {
    const double cap = gains.integral_limit / gains.ki;
    const double norm = integral.norm();
    if (norm > cap) integral *= cap / norm;
  }
  const VecX& tau_prev = state.prev_error_torque.size() == tau.size() ? state.prev_error_torque : tau;
  const VecX derivative = (tau - tau_prev) / gains.dt;
  out.q_control = clamp_joints(
      hand, q_current + gains.kp * tau + gains.ki * integral + gains.kd * derivative);
  out.state.integral = integral;
  out.state.prev_error_torque = tau;
  return out;
}

VecX grasp_close_step(const std::vector<bool>& contact_flags, const VecX& delta_q_grasp,
                      const VecX& q, const HandKinematics& hand) {
  if (static_cast<int>(contact_flags.size()) != hand.num_fingers()) {
    throw std::invalid_argument("grasp_close_step: one contact flag per finger required");
  }
  if (delta_q_grasp.size() != q.size() || q.size() != hand.num_joints()) {
    throw std::invalid_argument("grasp_close_step: joint vector length mismatch");
  }
  VecX out = q;
  for (int f = 0; f < hand.num_fingers(); ++f) {
    if (contact_flags[f]) continue;
    out.segment<kJointsPerFinger>(kJointsPerFinger * f) +=
        delta_q_grasp.segment<kJointsPerFinger>(kJointsPerFinger * f);
  }
  return clamp_joints(hand, out);
}

std::vector<bool> contact_flags(std::span<const Vec3> forces_world, double threshold) {
  std::vector<bool> flags;
  flags.reserve(forces_world.size());
  for (const Vec3& f : forces_world) flags.push_back(f.norm() >= threshold);
  return flags;
}

TransportContext make_transport_context(const HandKinematics& hand,
                                        std::vector<int> contact_fingers,
                                        const ControllerConfig& config,
                                        const VecX& q_reference) {
  TransportContext ctx;
  ctx.hand = hand;
  ctx.contact_fingers = std::move(contact_fingers);
  ctx.config = config;
  ctx.estimator = EstimatorState::initial(config.estimator);
  ctx.controller = initial_controller_state(hand.num_joints(),
                                            static_cast<int>(ctx.contact_fingers.size()));
  ctx.q_reference = q_reference;
  ctx.q_last_command = q_reference;
  return ctx;
}

namespace {

VecX heuristic_targets(const TransportContext& ctx, std::span<const Vec3> forces,
                       double mu, double weight) {
  const int m = static_cast<int>(forces.size());
  const bool has_thumb = std::find(ctx.contact_fingers.begin(), ctx.contact_fingers.end(),
                                   ctx.hand.thumb) != ctx.contact_fingers.end();
  const int others = has_thumb ? m - 1 : m;
  const double eta = ctx.config.eta;
  VecX f(3 * m);
  for (int i = 0; i < m; ++i) {
    const bool thumb = ctx.contact_fingers[i] == ctx.hand.thumb;
    const double normal =
        thumb ? eta * weight / (2.0 * mu) : eta * weight / (2.0 * others * mu);
    f[3 * i] = std::min(normal, ctx.config.gamma_up);
    f[3 * i + 1] = forces[i][1];
    f[3 * i + 2] = forces[i][2];
  }
  return f;
}

}  // namespace

TransportResult transport_step(TransportContext& ctx, const TactileFrame& tactile,
                               const VecX& q_current, double a_vertical) {
  const int m = static_cast<int>(ctx.contact_fingers.size());
  if (m < 2) throw std::invalid_argument("transport_step: needs at least two contacts");
  if (static_cast<int>(tactile.forces.size()) != m ||
      static_cast<int>(tactile.frames.size()) != m) {
    throw std::invalid_argument("transport_step: one reading per controlled contact required");
  }
  const ControllerConfig& cfg = ctx.config;
  TransportResult out;
  TransportDiagnostics& diag = out.diagnostics;
  diag.stage_log.push_back("read_tactile");

  ctx.estimator = filter_update(
      ctx.estimator, instantaneous_friction(tactile.forces, cfg.estimator.min_normal),
      instantaneous_gravity(tactile.forces, tactile.frames, a_vertical));
  diag.mu_tilde = ctx.estimator.mu_tilde;
  diag.g_tilde = ctx.estimator.g_tilde;
  diag.stage_log.push_back("estimate");

  const double mu = std::max(ctx.estimator.mu_tilde, cfg.mu_floor);
  std::vector<ConeBounds> bounds = adaptive_lower_bounds(tactile.forces, mu, cfg.gamma_up);
  for (const ConeBounds& b : bounds) {
    diag.gamma_low.push_back(b.gamma_low);
    diag.saturated.push_back(b.saturated);
  }
  diag.stage_log.push_back("bounds");

  VecX targets;
  if (cfg.mode == ControlMode::kNoSocp) {
    targets = heuristic_targets(ctx, tactile.forces, mu, ctx.estimator.g_tilde.norm());
    diag.stage_log.push_back("allocate");
  } else {
    const ConeProblem problem = assemble(tactile.frames, std::move(bounds),
                                         ctx.estimator.g_tilde, ctx.controller.f_prev,
                                         cfg.beta1, cfg.beta2);
    const Solution sol = solve(problem, cfg.solver);
    diag.stage_log.push_back("solve");
    diag.status = sol.status;
    diag.iterations = sol.iterations;
    diag.max_cone_residual = sol.max_cone_residual;
    const bool usable = sol.status == SolveStatus::kOptimal ||
                        (sol.status == SolveStatus::kMaxIters && sol.max_cone_residual <= 1e-6);
    if (!usable) {
      diag.solver_failed = true;
      diag.f_target_local = ctx.controller.f_prev;
      diag.stage_log.push_back("hold");
      out.q_control = ctx.q_last_command;
      return out;
    }
    targets = sol.f;
  }
  ctx.controller.f_prev = targets;
  diag.f_target_local = targets;

  // Only the normal components are regulated; the tangential ones arise
  // passively, so the tracking target reuses the measured tangential load.
  VecX target_world(3 * m), real_world(3 * m);
  for (int i = 0; i < m; ++i) {
    const Vec3 tracked(targets[3 * i], tactile.forces[i][1], tactile.forces[i][2]);
    target_world.segment<3>(3 * i) = local_to_world(tactile.frames[i], tracked);
    real_world.segment<3>(3 * i) = local_to_world(tactile.frames[i], tactile.forces[i]);
  }
  const MatX J = contact_jacobian(ctx.hand, q_current, ctx.contact_fingers);

  if (cfg.mode == ControlMode::kNoPid) {
    // Open loop: push each fingertip past its grasp-completion position by
    // the depth the assumed stiffness needs to produce the target.
    VecX displacement(3 * m);
    for (int i = 0; i < m; ++i) {
      displacement.segment<3>(3 * i) =
          tactile.frames[i].n * (targets[3 * i] / cfg.open_loop_stiffness);
    }
    const MatX J_ref = contact_jacobian(ctx.hand, ctx.q_reference, ctx.contact_fingers);
    const MatX JJt = J_ref * J_ref.transpose() + 1e-8 * MatX::Identity(3 * m, 3 * m);
    out.q_control =
        clamp_joints(ctx.hand, ctx.q_reference + J_ref.transpose() * JJt.ldlt().solve(displacement));
    ctx.q_last_command = out.q_control;
    diag.stage_log.push_back("open_loop");
    return out;
  }

  const VecX tau = error_torque(J, target_world, real_world);
  PidResult pid = pid_step(ctx.controller, cfg.gains, tau, q_current, ctx.hand);
  ctx.controller = std::move(pid.state);
  out.q_control = std::move(pid.q_control);
  ctx.q_last_command = out.q_control;
  diag.stage_log.push_back("pid");
  return out;
}

}  // namespace conegrasp
