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

#ifndef CONEGRASP_CHECKS_HPP_
#define CONEGRASP_CHECKS_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace conegrasp {

// Outcome of one randomized property check. `worst` is the largest observed
// violation measure (its meaning depends on the check) and `detail` is a
// one-line human-readable summary.
struct CheckResult {
  std::string name;
  bool passed = false;
  int samples = 0;
  double worst = 0.0;
  double seconds = 0.0;
  std::string detail;
};

// Random non-collinear contact triples, random axes and angles in
// (1e-3, 2 pi - 1e-3): the rotational slip bound stays positive and every
// per-contact displacement has length 2 |sin(theta / 2)| r within 1e-9.
CheckResult check_rotational_slip_lemma(int samples, std::uint64_t seed);

// Orthonormality and handedness of frames built from random normals, plus the
// local/world round trip, all within 1e-12.
CheckResult check_contact_frames(int samples, std::uint64_t seed);

// Random feasible allocation problems with two or three contacts solved by
// the interior-point method and by the polyhedral oracle. Passes when the
// relative objective gap |E - E_oracle| / (1 + |E_oracle|) <= 1e-3 and the
// cone/box residuals are <= 1e-6.
CheckResult check_solver_against_oracle(int instances, std::uint64_t seed,
                                        int grid = 40);

// Median wall time of assemble + solve for four contacts. `worst` holds the
// median in milliseconds; passes at or below `budget_ms`.
CheckResult check_solve_latency(int trials, std::uint64_t seed, double budget_ms = 10.0);

// Scaling G~, f_prev and the normal bounds by k scales the minimizer by k,
// and repeated solves of the same problem are bit-identical.
CheckResult check_solver_scaling(int instances, std::uint64_t seed);

// Midpoint convexity of the allocation objective on random pairs.
CheckResult check_objective_convexity(int samples, std::uint64_t seed);

// Synthetic equilibrium force streams, static and under constant vertical
// acceleration, run through the gravity estimator and window filter.
// Passes when |G~| / G = 1 within 1e-6 in every stream.
CheckResult check_estimation_identities(int streams, std::uint64_t seed);

// Forward-difference Jacobian (step 1e-7) against contact_jacobian on random
// interior configurations of the default hand (tolerance 1e-5), and
// (J^T f) . qdot = f . (J qdot) within 1e-10.
CheckResult check_jacobian(int configurations, std::uint64_t seed);

// Every check above at its documented sample size.
std::vector<CheckResult> run_property_suite(std::uint64_t seed);

std::string format_check(const CheckResult& result);

}  // namespace conegrasp

#endif  // CONEGRASP_CHECKS_HPP_
