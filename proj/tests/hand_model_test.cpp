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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "conegrasp/checks.hpp"

namespace conegrasp {
namespace {

HandKinematics single_finger() {
  HandKinematics hand;
  FingerSpec f;
  f.link_lengths = {0.05, 0.03, 0.02};
  hand.fingers.push_back(f);
  hand.joint_limits.assign(3, JointLimit{-2.0, 2.0});
  return hand;
}

TEST(ValidateTest, DefaultHandIsValid) {
  const HandKinematics hand = default_hand();
  EXPECT_NO_THROW(validate(hand));
  EXPECT_EQ(hand.num_fingers(), 4);
  EXPECT_EQ(hand.num_joints(), 12);
}

TEST(ValidateTest, RejectsMalformedHands) {
  HandKinematics h = single_finger();
  h.fingers[0].link_lengths[1] = 0.0;
  EXPECT_THROW(validate(h), std::invalid_argument);
  h = single_finger();
  h.joint_limits.pop_back();
  EXPECT_THROW(validate(h), std::invalid_argument);
  h = single_finger();
  h.thumb = 1;
  EXPECT_THROW(validate(h), std::invalid_argument);
  h = single_finger();
  h.joint_limits[0] = {1.0, 1.0};
  EXPECT_THROW(validate(h), std::invalid_argument);
  h = single_finger();
  h.fingers[0].joint_axes[0] = Vec3(1, 1, 0);
  EXPECT_THROW(validate(h), std::invalid_argument);
}

TEST(ForwardKinematicsTest, StraightChain) {
  const auto tips = forward_kinematics(single_finger(), VecX::Zero(3));
  ASSERT_EQ(tips.size(), 1u);
  EXPECT_NEAR((tips[0] - Vec3(0.10, 0, 0)).norm(), 0.0, 1e-15);
}

TEST(ForwardKinematicsTest, FirstJointQuarterTurn) {
  const VecX q = Vec3(std::numbers::pi / 2, 0, 0);
  const auto tips = forward_kinematics(single_finger(), q);
  EXPECT_NEAR((tips[0] - Vec3(0, 0.10, 0)).norm(), 0.0, 1e-15);
}

TEST(ForwardKinematicsTest, PalmPoseIsApplied) {
  HandKinematics h = single_finger();
  h.palm_pose.position = Vec3(1, 2, 3);
  h.palm_pose.orientation = Quat(Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitZ()));
  const auto tips = forward_kinematics(h, VecX::Zero(3));
  EXPECT_NEAR((tips[0] - Vec3(1, 2.10, 3)).norm(), 0.0, 1e-14);
}

TEST(ForwardKinematicsTest, ConfigurationIsClamped) {
  const HandKinematics h = single_finger();
  const auto a = forward_kinematics(h, Vec3(5.0, 0, 0));
  const auto b = forward_kinematics(h, Vec3(2.0, 0, 0));
  EXPECT_EQ(a[0], b[0]);
}

TEST(ForwardKinematicsTest, DefaultHandFlexionCurlsTowardCenter) {
  const HandKinematics h = default_hand();
  const auto straight = forward_kinematics(h, VecX::Zero(12));
  VecX q = VecX::Zero(12);
  for (int f = 0; f < 4; ++f) q[3 * f + 1] = 0.5;
  const auto bent = forward_kinematics(h, q);
  EXPECT_GT(bent[0].x(), straight[0].x());
  for (int f = 1; f < 4; ++f) EXPECT_LT(bent[f].x(), straight[f].x());
  for (int f = 0; f < 4; ++f) EXPECT_NEAR(straight[f].z(), -0.12, 1e-15);
}

TEST(ClampJointsTest, IntoLimitsAndIdempotent) {
  const HandKinematics h = default_hand();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 1000; ++k) {
    VecX q(12);
    for (int j = 0; j < 12; ++j) q[j] = u(rng);
    const VecX c = clamp_joints(h, q);
    for (int j = 0; j < 12; ++j) {
      EXPECT_GE(c[j], h.joint_limits[j].lo);
      EXPECT_LE(c[j], h.joint_limits[j].hi);
    }
    EXPECT_EQ(clamp_joints(h, c), c);
  }
  EXPECT_THROW(clamp_joints(h, VecX::Zero(11)), std::invalid_argument);
}

TEST(ContactJacobianTest, StraightChainColumns) {
  const std::vector<int> fingers = {0};
  const MatX J = contact_jacobian(single_finger(), VecX::Zero(3), fingers);
  ASSERT_EQ(J.rows(), 3);
  ASSERT_EQ(J.cols(), 3);
  // Joints sit at x = 0, 0.05 and 0.08; the tip is at x = 0.10.
  EXPECT_NEAR((J.col(0) - Vec3(0, 0.10, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((J.col(1) - Vec3(0, 0, -0.05)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((J.col(2) - Vec3(0, 0, -0.02)).norm(), 0.0, 1e-15);
}

TEST(ContactJacobianTest, OtherFingerColumnsAreZero) {
  const HandKinematics h = default_hand();
  VecX q = VecX::Constant(12, 0.3);
  const std::vector<int> fingers = {2, 0};
  const MatX J = contact_jacobian(h, q, fingers);
  ASSERT_EQ(J.rows(), 6);
  EXPECT_EQ(J.block(0, 0, 3, 6).norm(), 0.0);
  EXPECT_EQ(J.block(0, 9, 3, 3).norm(), 0.0);
  EXPECT_EQ(J.block(3, 3, 3, 9).norm(), 0.0);
  EXPECT_GT(J.block(0, 6, 3, 3).norm(), 0.0);
  EXPECT_GT(J.block(3, 0, 3, 3).norm(), 0.0);
}

TEST(ContactJacobianTest, InvalidAssignmentThrows) {
  const HandKinematics h = default_hand();
  const std::vector<int> repeated = {1, 1};
  const std::vector<int> out_of_range = {4};
  EXPECT_THROW(contact_jacobian(h, VecX::Zero(12), repeated), std::invalid_argument);
  EXPECT_THROW(contact_jacobian(h, VecX::Zero(12), out_of_range), std::invalid_argument);
}

TEST(ContactJacobianTest, FiniteDifferencesAndDuality) {
  const CheckResult r = check_jacobian(1000, 5);
  EXPECT_TRUE(r.passed) << format_check(r);
}

}  // namespace
}  // namespace conegrasp
