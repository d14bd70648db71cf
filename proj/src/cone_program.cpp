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
#include <string>

namespace conegrasp {

std::vector<ConeBounds> adaptive_lower_bounds(std::span<const Vec3> measured,
                                              double mu_tilde, double gamma_up) {
  if (!(mu_tilde > 0.0)) {
    throw std::invalid_argument("adaptive_lower_bounds: mu_tilde must be positive");
  }
  if (!(gamma_up >= 0.0)) {
    throw std::invalid_argument("adaptive_lower_bounds: gamma_up must be non-negative");
  }
  std::vector<ConeBounds> bounds;
  bounds.reserve(measured.size());
  for (const Vec3& f : measured) {
    ConeBounds b;
    b.mu_tilde = mu_tilde;
    b.gamma_up = gamma_up;
    const double raw = std::hypot(f[1], f[2]) / mu_tilde;
    if (raw > gamma_up) {
      b.gamma_low = gamma_up;
      b.saturated = true;
    } else {
      b.gamma_low = raw;
    }
    bounds.push_back(b);
  }
  return bounds;
}

ConeProblem assemble(std::vector<ContactFrame> frames,
                     std::vector<ConeBounds> bounds, const Vec3& g_tilde,
                     VecX f_prev, double beta1, double beta2) {
  const std::size_t m = frames.size();
  if (m == 0) throw std::invalid_argument("assemble: no contacts");
  if (bounds.size() != m) {
    throw std::invalid_argument("assemble: " + std::to_string(bounds.size()) +
                                " bounds for " + std::to_string(m) + " contacts");
  }
  if (f_prev.size() == 0) f_prev = VecX::Zero(3 * static_cast<Eigen::Index>(m));
  if (f_prev.size() != 3 * static_cast<Eigen::Index>(m)) {
    throw std::invalid_argument("assemble: f_prev has length " +
                                std::to_string(f_prev.size()) + ", expected " +
                                std::to_string(3 * m));
  }
  if (!(beta1 >= 0.0) || !(beta2 >= 0.0)) {
    throw std::invalid_argument("assemble: weights must be non-negative");
  }
  for (const ConeBounds& b : bounds) {
    if (!(b.mu_tilde > 0.0) || !(b.gamma_low >= 0.0) || !(b.gamma_up >= b.gamma_low)) {
      throw std::invalid_argument(
          "assemble: cone bounds need mu > 0 and 0 <= gamma_low <= gamma_up");
    }
  }
  ConeProblem problem;
  problem.frames = std::move(frames);
  problem.bounds = std::move(bounds);
  problem.g_tilde = g_tilde;
  problem.f_prev = std::move(f_prev);
  problem.beta1 = beta1;
  problem.beta2 = beta2;
  return problem;
}

Vec3 net_world_force(const ConeProblem& problem, const VecX& f) {
  Vec3 sum = Vec3::Zero();
  for (int i = 0; i < problem.num_contacts(); ++i) {
    sum += local_to_world(problem.frames[i], f.segment<3>(3 * i));
  }
  return sum;
}

double objective(const ConeProblem& problem, const VecX& f) {
  if (f.size() != problem.dim()) {
    throw std::invalid_argument("objective: force vector has wrong length");
  }
  const double e_eq = (net_world_force(problem, f) - problem.g_tilde).squaredNorm();
  const double e_smt = (f - problem.f_prev).squaredNorm();
  const double e_pen = f.squaredNorm();
  return e_eq + problem.beta1 * e_smt + problem.beta2 * e_pen;
}

std::vector<ContactResidual> feasibility_residuals(const ConeProblem& problem,
                                                   const VecX& f) {
  if (f.size() != problem.dim()) {
    throw std::invalid_argument("feasibility_residuals: force vector has wrong length");
  }
  std::vector<ContactResidual> out(problem.frames.size());
  for (int i = 0; i < problem.num_contacts(); ++i) {
    const ConeBounds& b = problem.bounds[i];
    const double fn = f[3 * i];
    const double ft = std::hypot(f[3 * i + 1], f[3 * i + 2]);
    out[i].lower = std::max(0.0, b.gamma_low - fn);
    out[i].upper = std::max(0.0, fn - b.gamma_up);
    out[i].cone = std::max(0.0, ft - b.mu_tilde * fn);
  }
  return out;
}

double max_residual(const std::vector<ContactResidual>& residuals) {
  double worst = 0.0;
  for (const ContactResidual& r : residuals) worst = std::max(worst, r.max());
  return worst;
}

QuadraticForm quadratic_form(const ConeProblem& problem) {
  const int n = problem.dim();
  // Equilibrium map: stacked local forces -> net world force.
  Eigen::Matrix<double, 3, Eigen::Dynamic> A(3, n);
  for (int i = 0; i < problem.num_contacts(); ++i) {
    A.block<3, 3>(0, 3 * i) = problem.frames[i].local_to_world_matrix();
  }
  const double reg = problem.beta1 + problem.beta2;
  QuadraticForm form;
  form.P = 2.0 * (A.transpose() * A + reg * MatX::Identity(n, n));
  form.q = -2.0 * (A.transpose() * problem.g_tilde + problem.beta1 * problem.f_prev);
  form.constant = problem.g_tilde.squaredNorm() + problem.beta1 * problem.f_prev.squaredNorm();
  return form;
}

}  // namespace conegrasp
