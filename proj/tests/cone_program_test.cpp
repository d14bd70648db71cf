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

#include "conegrasp/cone_program.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "conegrasp/checks.hpp"

namespace conegrasp {
namespace {

std::vector<ContactFrame> two_frames() {
  return {build_contact_frame(Vec3(-0.05, 0, 0), Vec3::UnitX()),
          build_contact_frame(Vec3(0.05, 0, 0), -Vec3::UnitX())};
}

ConeBounds bounds(double mu, double lo = 0.0, double up = 2.5) {
  ConeBounds b;
  b.mu_tilde = mu;
  b.gamma_low = lo;
  b.gamma_up = up;
  return b;
}

TEST(AdaptiveLowerBoundsTest, TangentialOverMu) {
  const std::vector<Vec3> f = {Vec3(1.0, 0.3, 0.4)};
  const auto b = adaptive_lower_bounds(f, 0.5, 2.5);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_NEAR(b[0].gamma_low, 1.0, 1e-15);
  EXPECT_FALSE(b[0].saturated);
}

TEST(AdaptiveLowerBoundsTest, ZeroTangentialGivesStaticBounds) {
  const std::vector<Vec3> f = {Vec3(0.7, 0, 0), Vec3(0, 0, 0)};
  const auto b = adaptive_lower_bounds(f, 0.4, 2.5);
  for (const ConeBounds& c : b) {
    EXPECT_EQ(c.gamma_low, 0.0);
    EXPECT_EQ(c.gamma_up, 2.5);
    EXPECT_EQ(c.mu_tilde, 0.4);
    EXPECT_FALSE(c.saturated);
  }
}

TEST(AdaptiveLowerBoundsTest, ClampedAtUpperBoundWithFlag) {
  const std::vector<Vec3> f = {Vec3(1.0, 2.0, 0.0)};
  const auto b = adaptive_lower_bounds(f, 0.4, 2.5);
  EXPECT_EQ(b[0].gamma_low, 2.5);
  EXPECT_TRUE(b[0].saturated);
}

TEST(AdaptiveLowerBoundsTest, RejectsNonPositiveMu) {
  const std::vector<Vec3> f = {Vec3(1, 0, 0)};
  EXPECT_THROW(adaptive_lower_bounds(f, 0.0, 2.5), std::invalid_argument);
  EXPECT_THROW(adaptive_lower_bounds(f, -0.1, 2.5), std::invalid_argument);
}

TEST(AssembleTest, DimensionBookkeeping) {
  const ConeProblem p =
      assemble(two_frames(), {bounds(0.4), bounds(0.4)}, Vec3(0, 0, 1), VecX(), 0.1, 0.01);
  EXPECT_EQ(p.num_contacts(), 2);
  EXPECT_EQ(p.dim(), 6);
  EXPECT_EQ(p.f_prev.size(), 6);
}

TEST(AssembleTest, RejectsEmptyAndMismatchedInput) {
  EXPECT_THROW(assemble({}, {}, Vec3::Zero(), VecX(), 0.1, 0.01), std::invalid_argument);
  EXPECT_THROW(assemble(two_frames(), {bounds(0.4)}, Vec3::Zero(), VecX(), 0.1, 0.01),
               std::invalid_argument);
  EXPECT_THROW(assemble(two_frames(), {bounds(0.4), bounds(0.4)}, Vec3::Zero(), VecX::Zero(5),
                        0.1, 0.01),
               std::invalid_argument);
  EXPECT_THROW(assemble(two_frames(), {bounds(0.4), bounds(0.4)}, Vec3::Zero(), VecX(), -1, 0),
               std::invalid_argument);
  EXPECT_THROW(assemble(two_frames(), {bounds(0.4), bounds(0.4, 3.0, 2.5)}, Vec3::Zero(), VecX(),
                        0.1, 0.01),
               std::invalid_argument);
}

TEST(ObjectiveTest, ExactEquilibriumWithoutRegularizationIsZero) {
  const ConeProblem p =
      assemble(two_frames(), {bounds(0.4), bounds(0.4)}, Vec3(0, 0, 1), VecX(), 0.0, 0.0);
  VecX f = VecX::Zero(6);
  // Each contact pushes 1.25 N inward and carries 0.5 N upward.
  for (int i = 0; i < 2; ++i) {
    f.segment<3>(3 * i) = world_to_local(p.frames[i], Vec3(i == 0 ? 1.25 : -1.25, 0, 0.5));
  }
  EXPECT_NEAR(objective(p, f), 0.0, 1e-15);
}

TEST(ObjectiveTest, ZeroForceAgainstUnitWeight) {
  for (double beta1 : {0.0, 0.1, 5.0}) {
    const ConeProblem p =
        assemble(two_frames(), {bounds(0.4), bounds(0.4)}, Vec3(0, 0, 1), VecX(), beta1, 0.3);
    EXPECT_DOUBLE_EQ(objective(p, VecX::Zero(6)), 1.0);
  }
}

TEST(ObjectiveTest, PenaltyTermOnSingleContact) {
  const std::vector<ContactFrame> frames = {build_contact_frame(Vec3::Zero(), Vec3(0, 0, 1))};
  const ConeProblem p = assemble(frames, {bounds(0.4)}, frames[0].n, VecX(), 0.0, 1.0);
  EXPECT_DOUBLE_EQ(objective(p, Vec3(1, 0, 0)), 1.0);
}

TEST(ObjectiveTest, RejectsWrongLength) {
  const ConeProblem p =
      assemble(two_frames(), {bounds(0.4), bounds(0.4)}, Vec3(0, 0, 1), VecX(), 0.1, 0.01);
  EXPECT_THROW(objective(p, VecX::Zero(5)), std::invalid_argument);
}

TEST(ObjectiveTest, QuadraticFormMatchesObjective) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  VecX prev(6);
  for (int i = 0; i < 6; ++i) prev[i] = u(rng);
  const ConeProblem p =
      assemble(two_frames(), {bounds(0.4), bounds(0.4)}, Vec3(0.1, 0.2, 1), prev, 0.1, 0.01);
  const QuadraticForm q = quadratic_form(p);
  for (int k = 0; k < 100; ++k) {
    VecX f(6);
    for (int i = 0; i < 6; ++i) f[i] = 3 * u(rng);
    EXPECT_NEAR(0.5 * f.dot(q.P * f) + q.q.dot(f) + q.constant, objective(p, f), 1e-12);
  }
}

TEST(ObjectiveTest, Convex) {
  const CheckResult r = check_objective_convexity(10000, 4);
  EXPECT_TRUE(r.passed) << format_check(r);
}

TEST(FeasibilityResidualsTest, InsideCone) {
  const std::vector<ContactFrame> frames = {build_contact_frame(Vec3::Zero(), Vec3::UnitZ())};
  const ConeProblem p = assemble(frames, {bounds(0.4)}, Vec3::Zero(), VecX(), 0, 0);
  const auto r = feasibility_residuals(p, Vec3(1.0, 0.2, 0.2));
  EXPECT_EQ(r[0].cone, 0.0);
  EXPECT_EQ(r[0].lower, 0.0);
  EXPECT_EQ(r[0].upper, 0.0);
}

TEST(FeasibilityResidualsTest, OutsideConeAndAboveUpperBound) {
  const std::vector<ContactFrame> frames = {build_contact_frame(Vec3::Zero(), Vec3::UnitZ())};
  const ConeProblem p = assemble(frames, {bounds(0.4)}, Vec3::Zero(), VecX(), 0, 0);
  EXPECT_NEAR(feasibility_residuals(p, Vec3(1.0, 0.5, 0.0))[0].cone, 0.1, 1e-15);
  EXPECT_NEAR(feasibility_residuals(p, Vec3(3.0, 0.0, 0.0))[0].upper, 0.5, 1e-15);
  const ConeProblem q = assemble(frames, {bounds(0.4, 1.0)}, Vec3::Zero(), VecX(), 0, 0);
  EXPECT_NEAR(feasibility_residuals(q, Vec3(0.25, 0.0, 0.0))[0].lower, 0.75, 1e-15);
}

TEST(FeasibilityResidualsTest, FeasibleSetIsConvex) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  const ConeProblem p = assemble(two_frames(), {bounds(0.6, 0.3), bounds(0.6, 0.0, 2.0)},
                                 Vec3::Zero(), VecX(), 0, 0);
  auto random_feasible = [&]() {
    VecX f(6);
    for (int i = 0; i < 2; ++i) {
      const double lo = p.bounds[i].gamma_low, up = p.bounds[i].gamma_up;
      const double fn = lo + (up - lo) * u(rng);
      const double ft = p.bounds[i].mu_tilde * fn * u(rng);
      const double a = 6.283185307179586 * u(rng);
      f.segment<3>(3 * i) = Vec3(fn, ft * std::cos(a), ft * std::sin(a));
    }
    return f;
  };
  for (int k = 0; k < 5000; ++k) {
    const VecX a = random_feasible(), b = random_feasible();
    ASSERT_EQ(max_residual(feasibility_residuals(p, a)), 0.0);
    const double lambda = u(rng);
    EXPECT_LE(max_residual(feasibility_residuals(p, lambda * a + (1 - lambda) * b)), 1e-15);
  }
}

TEST(NetWorldForceTest, SumsLocalForces) {
  const ConeProblem p =
      assemble(two_frames(), {bounds(0.4), bounds(0.4)}, Vec3::Zero(), VecX(), 0, 0);
  VecX f(6);
  f << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;
  EXPECT_NEAR(net_world_force(p, f).norm(), 0.0, 1e-15);
}

}  // namespace
}  // namespace conegrasp
