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

#ifndef CONEGRASP_HAND_MODEL_HPP_
#define CONEGRASP_HAND_MODEL_HPP_

#include <array>
#include <span>
#include <vector>

#include "conegrasp/types.hpp"

namespace conegrasp {

inline constexpr int kJointsPerFinger = 3;

// Serial chain of three revolute joints. Each joint rotates about
// `joint_axes[j]` expressed in the frame left by the previous joints; link j
// then extends `link_lengths[j]` along that frame's local x axis.
struct FingerSpec {
  Vec3 base_position = Vec3::Zero();       // palm frame
  Mat3 base_rotation = Mat3::Identity();   // palm frame
  std::array<Vec3, kJointsPerFinger> joint_axes = {Vec3::UnitZ(), Vec3::UnitY(),
                                                   Vec3::UnitY()};
  std::array<double, kJointsPerFinger> link_lengths = {0.05, 0.04, 0.03};
};

struct JointLimit {
  double lo = -1.6;
  double hi = 1.6;
};

struct HandKinematics {
  std::vector<FingerSpec> fingers;
  std::vector<JointLimit> joint_limits;  // one per joint, finger-major order
  Pose palm_pose;
  int thumb = 0;  // index of the opposing finger

  int num_fingers() const { return static_cast<int>(fingers.size()); }
  int num_joints() const { return kJointsPerFinger * num_fingers(); }
};

// Throws std::invalid_argument when link lengths, limits, axes or the thumb
// index are malformed.
void validate(const HandKinematics& hand);

// Four fingers with one opposing thumb. Positive flexion (second and third
// joints) curls every fingertip toward the palm center line.
HandKinematics default_hand();

// Elementwise clamp into the joint limits. Throws on a length mismatch.
VecX clamp_joints(const HandKinematics& hand, const VecX& q);

// World fingertip positions, evaluated at the clamped configuration.
std::vector<Vec3> forward_kinematics(const HandKinematics& hand, const VecX& q);

// Positional Jacobian (3m x J, world frame) of the fingertips of the listed
// fingers. Columns of joints on other fingers are zero. Evaluated at the
// clamped configuration; throws on repeated or out-of-range finger indices.
MatX contact_jacobian(const HandKinematics& hand, const VecX& q,
                      std::span<const int> contact_fingers);

}  // namespace conegrasp

#endif  // CONEGRASP_HAND_MODEL_HPP_
