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

#include "conegrasp/hand_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace conegrasp {
namespace {

struct ChainPoints {
  std::array<Vec3, kJointsPerFinger> joint_pos;
  std::array<Vec3, kJointsPerFinger> joint_axis;  // world
  Vec3 tip;
};

ChainPoints chain(const HandKinematics& hand, int finger, const VecX& q) {
  const FingerSpec& spec = hand.fingers[finger];
  const Mat3 palm_rot = hand.palm_pose.orientation.toRotationMatrix();
  Mat3 rot = palm_rot * spec.base_rotation;
  Vec3 pos = hand.palm_pose.apply(spec.base_position);
  ChainPoints out;
  for (int j = 0; j < kJointsPerFinger; ++j) {
    const Vec3& axis = spec.joint_axes[j];
    out.joint_pos[j] = pos;
    out.joint_axis[j] = rot * axis;
    rot = rot * Eigen::AngleAxisd(q[kJointsPerFinger * finger + j], axis).toRotationMatrix();
    pos += rot * Vec3(spec.link_lengths[j], 0.0, 0.0);
  }
  out.tip = pos;
  return out;
}

void check_length(const HandKinematics& hand, const VecX& q) {
  if (q.size() != hand.num_joints()) {
    throw std::invalid_argument("joint vector has length " + std::to_string(q.size()) +
                                ", hand has " + std::to_string(hand.num_joints()) +
                                " joints");
  }
}

}  // namespace

void validate(const HandKinematics& hand) {
  if (hand.fingers.empty()) throw std::invalid_argument("hand has no fingers");
  if (static_cast<int>(hand.joint_limits.size()) != hand.num_joints()) {
    throw std::invalid_argument("hand joint_limits must list one entry per joint");
  }
  if (hand.thumb < 0 || hand.thumb >= hand.num_fingers()) {
    throw std::invalid_argument("hand thumb index out of range");
  }
  for (const FingerSpec& f : hand.fingers) {
    for (double len : f.link_lengths) {
      if (!(len > 0.0)) throw std::invalid_argument("hand link lengths must be positive");
    }
    for (const Vec3& a : f.joint_axes) {
      if (std::abs(a.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("hand joint axes must be unit vectors");
      }
    }
    if (!(f.base_rotation.transpose() * f.base_rotation).isIdentity(1e-9) ||
        f.base_rotation.determinant() < 0.0) {
      throw std::invalid_argument("hand finger base_rotation must be a rotation");
    }
  }
  for (const JointLimit& l : hand.joint_limits) {
    if (!(l.lo < l.hi)) throw std::invalid_argument("hand joint limit needs lo < hi");
  }
}

HandKinematics default_hand() {
  HandKinematics hand;
  // Fingers hang along -z of the palm. The thumb flexes toward +x, the three
  // opposing fingers toward -x.
  auto make = [](const Vec3& base, const Vec3& flex_axis) {
    FingerSpec f;
    f.base_position = base;
    const Vec3 x(0.0, 0.0, -1.0);
    const Vec3 y = flex_axis;
    f.base_rotation.col(0) = x;
    f.base_rotation.col(1) = y;
    f.base_rotation.col(2) = x.cross(y);
    return f;
  };
  hand.fingers.push_back(make({-0.065, 0.0, 0.0}, {0.0, -1.0, 0.0}));
  for (double y : {-0.025, 0.0, 0.025}) {
    hand.fingers.push_back(make({0.065, y, 0.0}, {0.0, 1.0, 0.0}));
  }
  hand.thumb = 0;
  for (int f = 0; f < hand.num_fingers(); ++f) {
    hand.joint_limits.push_back({-0.35, 0.35});  // abduction
    hand.joint_limits.push_back({-0.5, 1.6});
    hand.joint_limits.push_back({-0.5, 1.6});
  }
  return hand;
}

VecX clamp_joints(const HandKinematics& hand, const VecX& q) {
  check_length(hand, q);
  VecX out = q;
  for (int j = 0; j < q.size(); ++j) {
    out[j] = std::clamp(q[j], hand.joint_limits[j].lo, hand.joint_limits[j].hi);
  }
  return out;
}

std::vector<Vec3> forward_kinematics(const HandKinematics& hand, const VecX& q) {
  const VecX qc = clamp_joints(hand, q);
  std::vector<Vec3> tips;
  tips.reserve(hand.fingers.size());
  for (int f = 0; f < hand.num_fingers(); ++f) tips.push_back(chain(hand, f, qc).tip);
  return tips;
}

MatX contact_jacobian(const HandKinematics& hand, const VecX& q,
                      std::span<const int> contact_fingers) {
  const VecX qc = clamp_joints(hand, q);
  std::vector<bool> used(hand.fingers.size(), false);
  MatX J = MatX::Zero(3 * static_cast<Eigen::Index>(contact_fingers.size()),
                      hand.num_joints());
  for (std::size_t i = 0; i < contact_fingers.size(); ++i) {
    const int f = contact_fingers[i];
    if (f < 0 || f >= hand.num_fingers() || used[f]) {
      throw std::invalid_argument("contact_jacobian: invalid contact-to-finger assignment");
    }
    used[f] = true;
    const ChainPoints c = chain(hand, f, qc);
    for (int j = 0; j < kJointsPerFinger; ++j) {
      J.block<3, 1>(3 * static_cast<Eigen::Index>(i), kJointsPerFinger * f + j) =
          c.joint_axis[j].cross(c.tip - c.joint_pos[j]);
    }
  }
  return J;
}

}  // namespace conegrasp
