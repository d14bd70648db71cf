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

#include "conegrasp/grasp_sim.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace conegrasp {
namespace {

struct BoxContact {
  Vec3 local_point;     // closest surface point, body frame
  Vec3 local_outward;   // outward surface normal, body frame
  double distance;      // signed distance of the query point (negative inside)
};

BoxContact box_closest(const Vec3& local, const Vec3& half) {
  BoxContact out;
  const Vec3 clamped = local.cwiseMax(-half).cwiseMin(half);
  const Vec3 delta = local - clamped;
  const double dist = delta.norm();
  if (dist > 1e-12) {
    out.local_point = clamped;
    out.local_outward = delta / dist;
    out.distance = dist;
    return out;
  }
  // Inside: leave through the nearest face.
  int face = 0;
  double depth = half[0] - std::abs(local[0]);
  for (int k = 1; k < 3; ++k) {
    const double dk = half[k] - std::abs(local[k]);
    if (dk < depth) {
      depth = dk;
      face = k;
    }
  }
  const double sign = local[face] >= 0.0 ? 1.0 : -1.0;
  out.local_point = local;
  out.local_point[face] = sign * half[face];
  out.local_outward = Vec3::Zero();
  out.local_outward[face] = sign;
  out.distance = -depth;
  return out;
}

std::array<Vec3, 8> box_corners(const Vec3& half) {
  std::array<Vec3, 8> c;
  for (int i = 0; i < 8; ++i) {
    c[i] = Vec3((i & 1) ? half[0] : -half[0], (i & 2) ? half[1] : -half[1],
                (i & 4) ? half[2] : -half[2]);
  }
  return c;
}

double finger_scale(const SimParams& params, std::size_t finger) {
  return finger < params.tangential_scale.size() ? params.tangential_scale[finger] : 1.0;
}

Quat exp_map(const Vec3& rotation_vector) {
  const double angle = rotation_vector.norm();
  if (angle < 1e-14) return Quat::Identity();
  return Quat(Eigen::AngleAxisd(angle, rotation_vector / angle));
}

}  // namespace

Mat3 ObjectSpec::box_inertia(double mass, const Vec3& half_extents) {
  const Vec3 size = 2.0 * half_extents;
  const Vec3 sq = size.cwiseProduct(size);
  return (mass / 12.0) * Vec3(sq[1] + sq[2], sq[0] + sq[2], sq[0] + sq[1]).asDiagonal();
}

void validate(const ObjectSpec& object) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("object." + field + ": " + why);
  };
  if (!(object.mass > 0.0)) fail("mass", "must be positive");
  if (!(object.mu_true > 0.0)) fail("mu_true", "must be positive");
  if (!(object.normal_stiffness > 0.0)) fail("normal_stiffness", "must be positive");
  if (!(object.tangential_stiffness > 0.0)) fail("tangential_stiffness", "must be positive");
  if (!(object.normal_damping >= 0.0)) fail("normal_damping", "must be non-negative");
  if (!(object.tangential_damping >= 0.0)) fail("tangential_damping", "must be non-negative");
  if (!(object.half_extents.minCoeff() > 0.0)) fail("half_extents", "must be positive");
  if ((object.com.cwiseAbs() - object.half_extents).maxCoeff() > 0.0) {
    fail("com", "must lie inside the box");
  }
  if (!object.inertia.isApprox(object.inertia.transpose(), 1e-12)) {
    fail("inertia", "must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(object.inertia);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) fail("inertia", "must be positive definite");
}

SimState initial_state(const ObjectSpec& object, const SimParams& params,
                       int num_fingers, const Vec3& xy) {
  SimState state;
  const double rest_sink =
      params.table ? object.mass * kGravity / (4.0 * params.table_stiffness) : 0.0;
  state.pose.position =
      Vec3(xy[0], xy[1], params.table_height + object.half_extents[2] - rest_sink);
  state.contacts.resize(static_cast<std::size_t>(num_fingers));
  state.slip_log.assign(static_cast<std::size_t>(num_fingers), 0.0);
  return state;
}

SimState sim_step(const SimState& state, const ObjectSpec& object,
                  const SimParams& params, std::span<const Vec3> fingertips,
                  const Vec3& external_accel, double dt) {
  if (!(dt > 0.0) || dt > kMaxSimDt) {
    throw std::invalid_argument("sim_step: dt must lie in (0, 0.002] s");
  }
  if (fingertips.size() != state.contacts.size()) {
    throw std::invalid_argument("sim_step: one fingertip position per finger required");
  }
  SimState next = state;
  const Mat3 R = state.pose.orientation.toRotationMatrix();
  const Vec3 x_com = state.com_position(object);
  const Vec3& v_com = state.com_velocity;
  const Vec3& omega = state.angular_velocity;

  Vec3 force = object.mass * (Vec3(0.0, 0.0, -kGravity) + external_accel);
  Vec3 torque = Vec3::Zero();

  for (std::size_t i = 0; i < fingertips.size(); ++i) {
    const ContactState& prev = state.contacts[i];
    ContactState& c = next.contacts[i];
    const Vec3 tip = fingertips[i];
    const Vec3 tip_vel = state.time > 0.0 ? Vec3((tip - prev.fingertip_pos) / dt) : Vec3::Zero();
    c.fingertip_pos = tip;

    const BoxContact box = box_closest(state.pose.inverse_apply(tip), object.half_extents);
    const double penetration = params.fingertip_radius - box.distance;
    if (penetration <= 0.0) {
      c.mode = ContactMode::kSeparated;
      c.penetration = 0.0;
      c.force.setZero();
      c.tangential_offset.setZero();
      c.point = tip;
      continue;
    }
    const Vec3 n = -(R * box.local_outward);
    const Vec3 point = state.pose.apply(box.local_point);
    const Vec3 v_body = v_com + omega.cross(point - x_com);
    const Vec3 v_rel = tip_vel - v_body;
    const double normal_force = std::max(
        0.0, object.normal_stiffness * penetration + object.normal_damping * v_rel.dot(n));

    if (prev.mode == ContactMode::kSeparated) c.body_anchor = box.local_point;
    const double k_t = object.tangential_stiffness * finger_scale(params, i);
    const Vec3 anchor = state.pose.apply(c.body_anchor);
    Vec3 offset = point - anchor;
    offset -= offset.dot(n) * n;
    const Vec3 v_tan = v_rel - v_rel.dot(n) * n;
    Vec3 tangential = k_t * offset + object.tangential_damping * v_tan;
    const double limit = object.mu_true * normal_force;
    const double trial_norm = tangential.norm();
    if (trial_norm > limit) {
      tangential = trial_norm > 0.0 ? Vec3(tangential * (limit / trial_norm)) : Vec3::Zero();
      // Slide the anchor until the spring alone is within the limit. The
      // stretch only ever shrinks here, so slipping cannot store energy.
      const double stretch = offset.norm();
      if (k_t * stretch > limit) {
        offset *= limit / (k_t * stretch);
        const Vec3 new_anchor = point - offset;
        next.slip_log[i] += (new_anchor - anchor).norm();
        c.body_anchor = state.pose.inverse_apply(new_anchor);
      }
      c.mode = ContactMode::kSlip;
    } else {
      c.mode = ContactMode::kStick;
    }
    c.penetration = penetration;
    c.point = point;
    c.normal = n;
    c.tangential_offset = offset;
    c.tangential_stiffness = k_t;
    c.force = normal_force * n + tangential;
    force += c.force;
    torque += (point - x_com).cross(c.force);
  }

  if (params.table) {
    for (const Vec3& corner : box_corners(object.half_extents)) {
      const Vec3 p = state.pose.apply(corner);
      const double pen = params.table_height - p.z();
      if (pen <= 0.0) continue;
      const Vec3 v = v_com + omega.cross(p - x_com);
      const double normal_force =
          std::max(0.0, params.table_stiffness * pen - params.table_damping * v.z());
      const Vec3 v_t(v.x(), v.y(), 0.0);
      const Vec3 friction = -params.table_friction * normal_force * v_t /
                            std::max(v_t.norm(), params.table_slip_speed);
      const Vec3 f = Vec3(0.0, 0.0, normal_force) + friction;
      force += f;
      torque += (p - x_com).cross(f);
    }
  }

  const Mat3 I_world = R * object.inertia * R.transpose();
  const Vec3 omega_dot = I_world.ldlt().solve(torque - omega.cross(I_world * omega));
  next.com_velocity = v_com + dt * force / object.mass;
  next.angular_velocity = omega + dt * omega_dot;
  const Vec3 x_next = x_com + dt * next.com_velocity;
  next.pose.orientation = (exp_map(dt * next.angular_velocity) * state.pose.orientation).normalized();
  next.pose.position = x_next - next.pose.orientation * object.com;
  next.time = state.time + dt;
  return next;
}

std::vector<ContactFrame> contact_frames(const SimState& state) {
  std::vector<ContactFrame> frames;
  frames.reserve(state.contacts.size());
  for (const ContactState& c : state.contacts) {
    frames.push_back(build_contact_frame(c.point, c.normal));
  }
  return frames;
}

std::vector<Vec3> TactileSensor::read(const SimState& state,
                                      std::span<const ContactFrame> frames) {
  if (frames.size() != state.contacts.size()) {
    throw std::invalid_argument("read_tactile: one frame per finger required");
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const ContactState& c = state.contacts[i];
    if (c.mode == ContactMode::kSeparated) {
      out.push_back(Vec3::Zero());
      continue;
    }
    Vec3 f = world_to_local(frames[i], c.force);
    if (sigma_ > 0.0) {
      for (int k = 0; k < 3; ++k) f[k] += sigma_ * noise(rng_);
    }
    out.push_back(f);
  }
  return out;
}

SlipReport detect_slip(const SimState& state) {
  SlipReport r;
  for (double s : state.slip_log) r.max_translational_slip = std::max(r.max_translational_slip, s);
  const Quat rel = state.reference_orientation.conjugate() * state.pose.orientation;
  r.rotation_angle = 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
  return r;
}

void mark_grasp_complete(SimState& state) {
  std::fill(state.slip_log.begin(), state.slip_log.end(), 0.0);
  state.reference_orientation = state.pose.orientation;
}

Vec3 apply_disturbance(const DisturbanceProfile& profile, double t_prev, double t,
                       ObjectSpec& object) {
  for (const MassStep& step : profile.mass_steps) {
    if (step.time > t_prev && step.time <= t) {
      const double new_mass = object.mass + step.delta_mass;
      if (!(new_mass > 0.0)) throw std::invalid_argument("mass step leaves a non-positive mass");
      object.inertia *= new_mass / object.mass;
      object.mass = new_mass;
    }
  }
  Vec3 accel = Vec3::Zero();
  for (const SinusoidalAccel& s : profile.sinusoids) {
    accel += s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency * t) *
             s.axis.normalized();
  }
  return accel;
}

double mechanical_energy(const SimState& state, const ObjectSpec& object,
                         const SimParams& params) {
  const Mat3 R = state.pose.orientation.toRotationMatrix();
  const Mat3 I_world = R * object.inertia * R.transpose();
  double e = 0.5 * object.mass * state.com_velocity.squaredNorm() +
             0.5 * state.angular_velocity.dot(I_world * state.angular_velocity) +
             object.mass * kGravity * state.com_position(object).z();
  // Springs are evaluated at the current pose; the stored contact fields
  // belong to the pose the last step started from.
  for (const ContactState& c : state.contacts) {
    if (c.mode == ContactMode::kSeparated) continue;
    const BoxContact box =
        box_closest(state.pose.inverse_apply(c.fingertip_pos), object.half_extents);
    const double pen = params.fingertip_radius - box.distance;
    if (pen <= 0.0) continue;
    const Vec3 n = -(R * box.local_outward);
    Vec3 offset = state.pose.apply(box.local_point) - state.pose.apply(c.body_anchor);
    offset -= offset.dot(n) * n;
    e += 0.5 * object.normal_stiffness * pen * pen +
         0.5 * c.tangential_stiffness * offset.squaredNorm();
  }
  if (params.table) {
    for (const Vec3& corner : box_corners(object.half_extents)) {
      const double pen = params.table_height - state.pose.apply(corner).z();
      if (pen > 0.0) e += 0.5 * params.table_stiffness * pen * pen;
    }
  }
  return e;
}

}  // namespace conegrasp
