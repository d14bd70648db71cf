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

#include "conegrasp/contact_geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "conegrasp/checks.hpp"

namespace conegrasp {
namespace {

constexpr double kPi = std::numbers::pi;

void ExpectVecNear(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR((a - b).norm(), 0.0, tol) << "got " << a.transpose() << " want " << b.transpose();
}

TEST(ContactFrameTest, NormalizesAndCompletesBasis) {
  const ContactFrame f = build_contact_frame(Vec3::Zero(), Vec3(0, 0, 2));
  ExpectVecNear(f.n, Vec3(0, 0, 1), 1e-15);
  EXPECT_NEAR(f.d.dot(f.n), 0.0, 1e-15);
  EXPECT_NEAR(f.c.dot(f.n), 0.0, 1e-15);
  EXPECT_NEAR(f.d.dot(f.c), 0.0, 1e-15);
  ExpectVecNear(f.d.cross(f.c), f.n, 1e-15);
}

TEST(ContactFrameTest, UnitXNormalGivesRightHandedTangents) {
  const ContactFrame f = build_contact_frame(Vec3::Zero(), Vec3(1, 0, 0));
  ExpectVecNear(f.d, Vec3(0, 1, 0), 0.0);
  ExpectVecNear(f.c, Vec3(0, 0, 1), 0.0);
  ExpectVecNear(f.d.cross(f.c), Vec3(1, 0, 0), 0.0);
}

TEST(ContactFrameTest, ZeroNormalIsDegenerate) {
  EXPECT_THROW(build_contact_frame(Vec3::Zero(), Vec3::Zero()), DegenerateInputError);
  EXPECT_THROW(build_contact_frame(Vec3::Zero(), Vec3(1e-12, 0, 0)), DegenerateInputError);
}

TEST(ContactFrameTest, IsDeterministic) {
  const Vec3 n(0.3, -0.7, 0.2);
  const ContactFrame a = build_contact_frame(Vec3(1, 2, 3), n);
  const ContactFrame b = build_contact_frame(Vec3(1, 2, 3), n);
  EXPECT_EQ(a.d, b.d);
  EXPECT_EQ(a.c, b.c);
}

TEST(ContactFrameTest, OrthonormalForManyRandomNormals) {
  const CheckResult r = check_contact_frames(100000, 11);
  EXPECT_TRUE(r.passed) << format_check(r);
  EXPECT_LE(r.worst, 1e-12);
}

TEST(LocalWorldTest, PureNormalComponent) {
  const ContactFrame f = build_contact_frame(Vec3::Zero(), Vec3::UnitZ());
  ExpectVecNear(local_to_world(f, Vec3(2, 0, 0)), Vec3(0, 0, 2), 1e-15);
  ExpectVecNear(local_to_world(f, Vec3::Zero()), Vec3::Zero(), 0.0);
}

TEST(LocalWorldTest, HandBuiltFrame) {
  ContactFrame f;
  f.n = Vec3(0, 0, 1);
  f.d = Vec3(1, 0, 0);
  f.c = Vec3(0, 1, 0);
  ExpectVecNear(local_to_world(f, Vec3(1, 1, 0)), Vec3(1, 0, 1), 0.0);
}

TEST(LocalWorldTest, RoundTripIsIdentity) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int k = 0; k < 1000; ++k) {
    const ContactFrame f = build_contact_frame(Vec3::Zero(), Vec3(g(rng), g(rng), g(rng)));
    const Vec3 v(g(rng), g(rng), g(rng));
    ExpectVecNear(local_to_world(f, world_to_local(f, v)), v, 1e-12);
    ExpectVecNear(world_to_local(f, local_to_world(f, v)), v, 1e-12);
  }
}

TEST(SlipDisplacementTest, QuarterTurnAboutX) {
  const RotationAxis x = RotationAxis::through(Vec3::Zero(), Vec3::UnitX());
  const Vec3 d = slip_displacement(Vec3(0, 1, 0), x, kPi / 2);
  ExpectVecNear(d, Vec3(0, -1, 1), 1e-15);
  EXPECT_NEAR(d.norm(), std::sqrt(2.0), 1e-15);
}

TEST(SlipDisplacementTest, PointOnAxisDoesNotMove) {
  const RotationAxis x = RotationAxis::through(Vec3::Zero(), Vec3::UnitX());
  for (double theta : {0.1, 1.0, 3.0, 6.0}) {
    ExpectVecNear(slip_displacement(Vec3(5, 0, 0), x, theta), Vec3::Zero(), 0.0);
  }
}

TEST(SlipDisplacementTest, FullTurnIsIdentity) {
  const RotationAxis axis = RotationAxis::through(Vec3(0.1, 0.2, 0.3), Vec3(1, 2, 3));
  ExpectVecNear(slip_displacement(Vec3(-0.4, 0.7, 0.1), axis, 2 * kPi), Vec3::Zero(), 1e-15);
}

TEST(SlipDisplacementTest, ClosedFormAndNoAxialComponent) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 10000; ++k) {
    const RotationAxis axis =
        RotationAxis::through(Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng)));
    const Vec3 p(u(rng), u(rng), u(rng));
    const double theta = 4 * kPi * u(rng);
    const Vec3 d = slip_displacement(p, axis, theta);
    const double r = (p - axis.point).cross(axis.direction).norm();
    EXPECT_NEAR(d.norm(), 2 * std::abs(std::sin(theta / 2)) * r, 1e-9);
    EXPECT_NEAR(d.dot(axis.direction), 0.0, 1e-12);
  }
}

TEST(SlipDisplacementTest, RotateThenUnrotateRestoresPositions) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 1000; ++k) {
    const RotationAxis axis =
        RotationAxis::through(Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng)));
    const Vec3 p(u(rng), u(rng), u(rng));
    const double theta = 3 * u(rng);
    const Vec3 moved = p + slip_displacement(p, axis, theta);
    ExpectVecNear(moved + slip_displacement(moved, axis, -theta), p, 1e-12);
  }
}

TEST(RotationAxisTest, ZeroDirectionRejected) {
  EXPECT_THROW(RotationAxis::through(Vec3::Zero(), Vec3::Zero()), DegenerateInputError);
  EXPECT_NEAR(RotationAxis::through(Vec3::Zero(), Vec3(0, 3, 4)).direction.norm(), 1.0, 1e-15);
}

TEST(RotationalSlipBoundTest, ThreeContactsHalfTurn) {
  const std::vector<Vec3> pts = {Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(1, 0, 0)};
  const RotationAxis x = RotationAxis::through(Vec3::Zero(), Vec3::UnitX());
  EXPECT_NEAR(rotational_slip_bound(pts, x, kPi), 2.0, 1e-15);
}

TEST(RotationalSlipBoundTest, CollinearOnAxisIsZero) {
  const std::vector<Vec3> pts = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  const RotationAxis x = RotationAxis::through(Vec3::Zero(), Vec3::UnitX());
  EXPECT_EQ(rotational_slip_bound(pts, x, 1.3), 0.0);
}

TEST(RotationalSlipBoundTest, IdentityRotationIsZero) {
  const std::vector<Vec3> pts = {Vec3(0, 1, 0), Vec3(0, 0, 1)};
  const RotationAxis x = RotationAxis::through(Vec3::Zero(), Vec3::UnitX());
  EXPECT_EQ(rotational_slip_bound(pts, x, 0.0), 0.0);
}

TEST(RotationalSlipBoundTest, EmptyContactsRejected) {
  const RotationAxis x = RotationAxis::through(Vec3::Zero(), Vec3::UnitX());
  EXPECT_THROW(rotational_slip_bound(std::vector<Vec3>{}, x, 1.0), std::invalid_argument);
}

TEST(RotationalSlipBoundTest, PositiveForNonCollinearTriples) {
  const CheckResult r = check_rotational_slip_lemma(10000, 21);
  EXPECT_TRUE(r.passed) << format_check(r);
}

TEST(CollinearTest, Examples) {
  EXPECT_TRUE(is_collinear(std::vector<Vec3>{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}));
  EXPECT_FALSE(is_collinear(std::vector<Vec3>{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}));
  EXPECT_TRUE(
      is_collinear(std::vector<Vec3>{Vec3(0, 0, 0), Vec3(1, 1e-12, 0), Vec3(2, 0, 0)}, 1e-9));
  EXPECT_TRUE(is_collinear(std::vector<Vec3>{Vec3(0, 0, 0), Vec3(1, 1, 1)}));
}

TEST(CorotationTest, FixedNormalViolates) {
  const std::vector<double> thetas = {0.0, 0.3, 1.0, 2.5};
  const double v = corotation_violation(
      Vec3(0, 1, 0), [](double) { return Vec3(1, 0, 0); }, thetas);
  EXPECT_GE(v, 1.0);
}

TEST(CorotationTest, CorotatingNormalSatisfiesConditions) {
  // The contact (0, 1, 0) moves to (0, cos t, sin t); a normal orthogonal to
  // that position with no x component meets both conditions.
  const std::vector<double> thetas = {0.0, 0.3, 1.0, 2.5, 4.0};
  const double v = corotation_violation(
      Vec3(0, 1, 0), [](double t) { return Vec3(0, -std::sin(t), std::cos(t)); }, thetas);
  EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(CorotationTest, OnAxisContactRejected) {
  const std::vector<double> thetas = {0.5};
  EXPECT_THROW(
      corotation_violation(Vec3(3, 0, 0), [](double) { return Vec3(0, 0, 1); }, thetas),
      DegenerateInputError);
}

}  // namespace
}  // namespace conegrasp
