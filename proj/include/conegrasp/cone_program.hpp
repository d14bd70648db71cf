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

#ifndef CONEGRASP_CONE_PROGRAM_HPP_
#define CONEGRASP_CONE_PROGRAM_HPP_

#include <algorithm>
#include <span>
#include <vector>

#include "conegrasp/contact_geometry.hpp"
#include "conegrasp/types.hpp"

namespace conegrasp {

inline constexpr double kDefaultGammaUp = 2.5;  // N
inline constexpr double kDefaultBeta1 = 0.1;
inline constexpr double kDefaultBeta2 = 0.01;

// Per-contact friction cone:
//   gamma_low <= f_n <= gamma_up,  |(f_d, f_c)| <= mu_tilde * f_n.
struct ConeBounds {
  double gamma_low = 0.0;
  double gamma_up = kDefaultGammaUp;
  double mu_tilde = 0.4;
  // Set when the measured tangential load asked for more than gamma_up.
  bool saturated = false;
};

// One force-allocation instance. Decision variable is the stacked local
// force vector (3 entries per contact, ordered n, d, c).
struct ConeProblem {
  std::vector<ContactFrame> frames;
  std::vector<ConeBounds> bounds;
  Vec3 g_tilde = Vec3::Zero();
  VecX f_prev;
  double beta1 = kDefaultBeta1;
  double beta2 = kDefaultBeta2;

  int num_contacts() const { return static_cast<int>(frames.size()); }
  int dim() const { return 3 * num_contacts(); }
};

struct ContactResidual {
  double lower = 0.0;  // max(0, gamma_low - f_n)
  double upper = 0.0;  // max(0, f_n - gamma_up)
  double cone = 0.0;   // max(0, |f_t| - mu f_n)

  double max() const { return std::max(lower, std::max(upper, cone)); }
};

// gamma_low_i = |f_t,i| / mu_tilde, clamped to gamma_up with a saturation
// flag. Throws std::invalid_argument for mu_tilde <= 0 or gamma_up < 0.
std::vector<ConeBounds> adaptive_lower_bounds(std::span<const Vec3> measured,
                                              double mu_tilde, double gamma_up);

// Validates sizes and weights. Throws std::invalid_argument on mismatch, an
// empty contact set, negative weights or malformed bounds.
ConeProblem assemble(std::vector<ContactFrame> frames,
                     std::vector<ConeBounds> bounds, const Vec3& g_tilde,
                     VecX f_prev, double beta1, double beta2);

// |sum_i J_i^T f_i - G|^2 + beta1 |f - f_prev|^2 + beta2 |f|^2.
double objective(const ConeProblem& problem, const VecX& f);

// Sum of world-frame contact forces for a stacked local force vector.
Vec3 net_world_force(const ConeProblem& problem, const VecX& f);

std::vector<ContactResidual> feasibility_residuals(const ConeProblem& problem,
                                                   const VecX& f);
double max_residual(const std::vector<ContactResidual>& residuals);

// The objective written as 0.5 f^T P f + q^T f + constant.
struct QuadraticForm {
  MatX P;
  VecX q;
  double constant = 0.0;
};
QuadraticForm quadratic_form(const ConeProblem& problem);

}  // namespace conegrasp

#endif  // CONEGRASP_CONE_PROGRAM_HPP_
