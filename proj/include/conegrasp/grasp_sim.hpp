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

#ifndef CONEGRASP_GRASP_SIM_HPP_
#define CONEGRASP_GRASP_SIM_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "conegrasp/contact_geometry.hpp"
#include "conegrasp/types.hpp"

namespace conegrasp {

enum class ComplianceClass { kRigid, kDeformable };

inline constexpr double kRigidNormalStiffness = 2000.0;       // N/m
inline constexpr double kDeformableNormalStiffness = 400.0;   // N/m
inline constexpr double kDefaultTangentialStiffness = 1500.0; // N/m
inline constexpr double kMaxSimDt = 2e-3;                     // s

// Box-shaped rigid object. The body frame sits at the box center; `com` is the
// center-of-mass offset in that frame and `inertia` is taken about the COM.
struct ObjectSpec {
  double mass = 0.1;
  Vec3 com = Vec3::Zero();
  Mat3 inertia = Mat3::Identity() * 1e-4;
  double mu_true = 0.8;
  ComplianceClass compliance = ComplianceClass::kRigid;
  double normal_stiffness = kRigidNormalStiffness;
  double tangential_stiffness = kDefaultTangentialStiffness;
  double normal_damping = 5.0;       // N s/m
  double tangential_damping = 3.0;   // N s/m
  Vec3 half_extents = Vec3(0.03, 0.03, 0.05);

  // Solid-box inertia about the geometric center.
  static Mat3 box_inertia(double mass, const Vec3& half_extents);
};

// Throws std::invalid_argument naming the offending field.
void validate(const ObjectSpec& object);

// Environment and contact parameters that are not properties of the object.
struct SimParams {
  double fingertip_radius = 0.008;  // m
  // Per-finger multiplier on the object's tangential stiffness; empty means 1.
  std::vector<double> tangential_scale;
  bool table = true;
  double table_height = 0.0;
  double table_stiffness = 100.0;  // N/m per box corner
  double table_damping = 2.0;
  double table_friction = 0.5;
  double table_slip_speed = 1e-3;  // m/s, friction regularization
};

enum class ContactMode { kSeparated, kStick, kSlip };

struct ContactState {
  Vec3 fingertip_pos = Vec3::Zero();
  Vec3 body_anchor = Vec3::Zero();  // object frame stick anchor
  double penetration = 0.0;
  ContactMode mode = ContactMode::kSeparated;
  Vec3 point = Vec3::Zero();         // world contact point on the surface
  Vec3 normal = Vec3::UnitZ();       // inward normal, last value in contact
  Vec3 force = Vec3::Zero();         // world force on the object
  Vec3 tangential_offset = Vec3::Zero();  // spring stretch used for energy
  double tangential_stiffness = 0.0;
};

struct SimState {
  Pose pose;                       // body frame (box center)
  Vec3 com_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();  // world frame
  std::vector<ContactState> contacts;    // one per finger
  double time = 0.0;
  std::vector<double> slip_log;          // cumulative tangential slip per finger
  Quat reference_orientation = Quat::Identity();

  Vec3 com_position(const ObjectSpec& object) const { return pose.apply(object.com); }
};

// Object resting with its bottom face on the table plane, no contacts yet.
SimState initial_state(const ObjectSpec& object, const SimParams& params,
                       int num_fingers, const Vec3& xy = Vec3::Zero());

// One semi-implicit Euler step. Fingertip velocities come from the change in
// `fingertips` since the previous step. `external_accel` is applied to the
// COM as an extra body acceleration. Throws for dt outside (0, 2e-3].
SimState sim_step(const SimState& state, const ObjectSpec& object,
                  const SimParams& params, std::span<const Vec3> fingertips,
                  const Vec3& external_accel, double dt);

// Frames at the current contact points. Separated contacts keep their last
// normal and sit at the fingertip.
std::vector<ContactFrame> contact_frames(const SimState& state);

// Noisy readout of the spring forces in each contact's local frame.
class TactileSensor {
 public:
  TactileSensor(double noise_sigma, std::uint64_t seed)
      : sigma_(noise_sigma), rng_(seed) {}

  // Separated contacts read exactly zero.
  std::vector<Vec3> read(const SimState& state, std::span<const ContactFrame> frames);

 private:
  double sigma_;
  std::mt19937_64 rng_;
};

struct SlipReport {
  double max_translational_slip = 0.0;  // m
  double rotation_angle = 0.0;          // rad, relative to the reference pose
};
SlipReport detect_slip(const SimState& state);

// Zeroes the slip logs and makes the current orientation the reference.
void mark_grasp_complete(SimState& state);

struct MassStep {
  double time = 0.0;
  double delta_mass = 0.0;
};

// Acceleration amplitude (m/s^2) and frequency (Hz) along `axis`.
struct SinusoidalAccel {
  double amplitude = 0.0;
  double frequency = 0.0;
  Vec3 axis = Vec3::UnitZ();
};

struct DisturbanceProfile {
  std::vector<MassStep> mass_steps;
  std::vector<SinusoidalAccel> sinusoids;
  bool empty() const { return mass_steps.empty() && sinusoids.empty(); }
};

// Applies the mass steps that fall in (t_prev, t] (inertia scales with mass)
// and returns the external acceleration at time t.
Vec3 apply_disturbance(const DisturbanceProfile& profile, double t_prev, double t,
                       ObjectSpec& object);

// Kinetic + gravitational + contact spring energy (fingertips held fixed).
double mechanical_energy(const SimState& state, const ObjectSpec& object,
                         const SimParams& params);

}  // namespace conegrasp

#endif  // CONEGRASP_GRASP_SIM_HPP_
