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

#include "conegrasp/socp_solver.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "conegrasp/checks.hpp"
#include "conegrasp/cone_program.hpp"

namespace conegrasp {
namespace {

ConeBounds bounds(double mu, double lo = 0.0, double up = 2.5) {
  ConeBounds b;
  b.mu_tilde = mu;
  b.gamma_low = lo;
  b.gamma_up = up;
  return b;
}

ConeProblem antipodal(const Vec3& g, double lo = 0.0) {
  std::vector<ContactFrame> frames = {build_contact_frame(Vec3(-0.05, 0, 0), Vec3::UnitX()),
                                      build_contact_frame(Vec3(0.05, 0, 0), -Vec3::UnitX())};
  return assemble(std::move(frames), {bounds(0.4, lo), bounds(0.4, lo)}, g, VecX(), 0.0, 1e-6);
}

TEST(SolveTest, AntipodalPinchCarriesWeight) {
  const ConeProblem p = antipodal(Vec3(0, 0, 1));
  const Solution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  const Vec3 w0 = local_to_world(p.frames[0], s.f.segment<3>(0));
  const Vec3 w1 = local_to_world(p.frames[1], s.f.segment<3>(3));
  EXPECT_NEAR((w0 - Vec3(1.25, 0, 0.5)).norm(), 0.0, 1e-4);
  EXPECT_NEAR((w1 - Vec3(-1.25, 0, 0.5)).norm(), 0.0, 1e-4);
  EXPECT_LE(s.max_cone_residual, 1e-8);
}

TEST(SolveTest, ZeroLoadGivesZeroForce) {
  const Solution s = solve(antipodal(Vec3::Zero()));
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_LE(s.f.norm(), 1e-8);
}

TEST(SolveTest, LowerBoundActiveWithoutLoad) {
  const Solution s = solve(antipodal(Vec3::Zero(), 1.0));
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.f[0], 1.0, 1e-7);
  EXPECT_NEAR(s.f[3], 1.0, 1e-7);
  EXPECT_NEAR(s.f.segment<2>(1).norm(), 0.0, 1e-7);
  EXPECT_NEAR(s.f.segment<2>(4).norm(), 0.0, 1e-7);
}

TEST(SolveTest, CrossedBoundsAreInfeasible) {
  std::vector<ContactFrame> frames = {build_contact_frame(Vec3::Zero(), Vec3::UnitZ())};
  ConeProblem p = assemble(frames, {bounds(0.4)}, Vec3::Zero(), VecX(), 0.1, 0.01);
  p.bounds[0].gamma_low = 3.0;
  EXPECT_EQ(solve(p).status, SolveStatus::kInfeasible);
  EXPECT_EQ(oracle_solve(p).status, SolveStatus::kInfeasible);
}

TEST(SolveTest, EqualBoundsPinTheNormal) {
  std::vector<ContactFrame> frames = {build_contact_frame(Vec3::Zero(), Vec3::UnitZ())};
  const ConeProblem p =
      assemble(frames, {bounds(0.5, 1.5, 1.5)}, Vec3(0.2, 0, 0), VecX(), 0.0, 0.0);
  const Solution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.f[0], 1.5, 1e-8);
}

TEST(SolveTest, RepeatedSolvesAreBitIdentical) {
  const ConeProblem p = antipodal(Vec3(0.1, -0.2, 1.3), 0.2);
  const Solution a = solve(p);
  const Solution b = solve(p);
  ASSERT_EQ(a.f.size(), b.f.size());
  for (int i = 0; i < a.f.size(); ++i) EXPECT_EQ(a.f[i], b.f[i]);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SolveTest, WarmStartDoesNotChangeTheMinimizer) {
  ConeProblem p = antipodal(Vec3(0.1, -0.2, 1.3), 0.2);
  p.beta1 = 0.1;
  p.f_prev = VecX::Constant(6, 0.3);
  SolverSettings cold;
  cold.warm_start = false;
  const Solution a = solve(p);
  const Solution b = solve(p, cold);
  ASSERT_EQ(a.status, SolveStatus::kOptimal);
  ASSERT_EQ(b.status, SolveStatus::kOptimal);
  EXPECT_LE((a.f - b.f).norm(), 1e-6);
}

TEST(SolveTest, ScalesWithTheLoad) {
  const CheckResult r = check_solver_scaling(100, 17);
  EXPECT_TRUE(r.passed) << format_check(r);
}

TEST(SolveTest, MatchesPolyhedralOracle) {
  const CheckResult r = check_solver_against_oracle(200, 23);
  EXPECT_TRUE(r.passed) << format_check(r);
}

TEST(SolveTest, RejectsNothingButReportsStatusName) {
  EXPECT_EQ(to_string(SolveStatus::kOptimal), "optimal");
  EXPECT_NE(to_string(SolveStatus::kInfeasible), to_string(SolveStatus::kMaxIters));
}

TEST(OracleTest, SingleContactAlongNormal) {
  std::vector<ContactFrame> frames = {build_contact_frame(Vec3::Zero(), Vec3(0, 0, 1))};
  const ConeProblem p = assemble(frames, {bounds(0.4)}, Vec3(0, 0, 1), VecX(), 0.0, 0.0);
  const Solution s = oracle_solve(p);
  EXPECT_NEAR((s.f - Vec3(1, 0, 0)).norm(), 0.0, 1e-6);
}

TEST(OracleTest, ZeroLoadGivesZero) {
  const Solution s = oracle_solve(antipodal(Vec3::Zero()));
  EXPECT_NEAR(s.f.norm(), 0.0, 1e-9);
}

TEST(OracleTest, NeverBelowInteriorPointObjective) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 50; ++k) {
    const ConeProblem p = antipodal(Vec3(0.3 * u(rng), 0.3 * u(rng), 1 + u(rng)), 0.1);
    const Solution ipm = solve(p);
    const Solution ref = oracle_solve(p);
    ASSERT_EQ(ipm.status, SolveStatus::kOptimal);
    EXPECT_GE(ref.objective_value, ipm.objective_value - 1e-7 * (1 + ipm.objective_value));
  }
}

TEST(OracleTest, RejectsTooManyContacts) {
  std::vector<ContactFrame> frames;
  for (int i = 0; i < 4; ++i) frames.push_back(build_contact_frame(Vec3::Zero(), Vec3::UnitZ()));
  const ConeProblem p = assemble(frames, std::vector<ConeBounds>(4, bounds(0.4)), Vec3::Zero(),
                                 VecX(), 0.1, 0.01);
  EXPECT_THROW(oracle_solve(p), std::invalid_argument);
}

}  // namespace
}  // namespace conegrasp
