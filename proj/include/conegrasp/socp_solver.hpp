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

#ifndef CONEGRASP_SOCP_SOLVER_HPP_
#define CONEGRASP_SOCP_SOLVER_HPP_

#include <string_view>

#include "conegrasp/cone_program.hpp"

namespace conegrasp {

struct SolverSettings {
  double feas_tol = 1e-8;
  double opt_tol = 1e-8;
  int max_iters = 200;
  // Seed the primal iterate with problem.f_prev when it is non-zero.
  bool warm_start = true;
};

enum class SolveStatus { kOptimal = 0, kMaxIters = 1, kInfeasible = 2 };

std::string_view to_string(SolveStatus status);

struct Solution {
  VecX f;
  SolveStatus status = SolveStatus::kMaxIters;
  int iterations = 0;
  double objective_value = 0.0;
  double max_cone_residual = 0.0;
  // Certificate of the final iterate: s^T z for the cone pairs.
  double duality_gap = 0.0;
};

// Primal-dual interior-point method with Nesterov-Todd scaling over one
// 3-dimensional second-order cone per contact plus the normal-force box,
// folded in as two non-negative orthant rows per contact. A contact whose
// bounds coincide becomes an equality on its normal component.
//
// On kOptimal the cone/box residuals of `f` are <= feas_tol and the duality
// gap is <= opt_tol * (1 + |objective|). kInfeasible is only returned when a
// contact has gamma_low > gamma_up. Deterministic for fixed inputs.
Solution solve(const ConeProblem& problem, const SolverSettings& settings = {});

// Reference minimizer over an inner polyhedral approximation of each cone:
// the tangential disk is replaced by an inscribed polygon with `grid`
// uniformly spaced vertices and refined twice around the incumbent tangential
// direction, each round solved exactly by a primal active-set QP. The
// returned point is feasible for the true cones, so its objective is never
// below the true minimum. Intended for verification; requires m <= 3.
Solution oracle_solve(const ConeProblem& problem, int grid = 40);

}  // namespace conegrasp

#endif  // CONEGRASP_SOCP_SOLVER_HPP_
