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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/LU>

#include "conegrasp/socp_solver.hpp"

namespace conegrasp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// a^T x >= b (or == b for equalities).
struct Constraint {
  VecX a;
  double b = 0.0;
  bool equality = false;
};

// Primal active-set method for a strictly convex QP started from a feasible
// point. Dense KKT solves; the instances here have at most nine variables.
class ActiveSetQp {
 public:
  ActiveSetQp(MatX H, VecX c) : H_(std::move(H)), c_(std::move(c)) {}

  VecX solve(const std::vector<Constraint>& cons, VecX x) const {
    const int n = static_cast<int>(x.size());
    std::vector<int> working;
    for (int i = 0; i < static_cast<int>(cons.size()); ++i) {
      if (cons[i].equality) working.push_back(i);
    }
    bool at_minimizer = false;
    const int max_iters = 50 * static_cast<int>(cons.size()) + 100;
    for (int iter = 0; iter < max_iters; ++iter) {
      const int k = static_cast<int>(working.size());
      MatX kkt = MatX::Zero(n + k, n + k);
      VecX rhs = VecX::Zero(n + k);
      kkt.topLeftCorner(n, n) = H_;
      for (int j = 0; j < k; ++j) {
        const VecX& a = cons[working[j]].a;
        kkt.block(0, n + j, n, 1) = -a;
        kkt.block(n + j, 0, 1, n) = a.transpose();
      }
      rhs.head(n) = -(H_ * x + c_);
      const VecX sol = kkt.fullPivLu().solve(rhs);
      const VecX p = sol.head(n);
      const double grad_scale = 1.0 + rhs.head(n).norm();

      // A full unblocked step lands on the working-set minimizer, so the
      // next direction is pure round-off and is treated as zero.
      if (at_minimizer || p.norm() <= 1e-10 * (1.0 + x.norm())) {
        at_minimizer = false;
        // Stationary on the working set. Bland's rule: drop the negative
        // multiplier with the smallest constraint index.
        int drop = -1;
        for (int j = 0; j < k; ++j) {
          if (cons[working[j]].equality || sol[n + j] >= -1e-9 * grad_scale) continue;
          if (drop < 0 || working[j] < working[drop]) drop = j;
        }
        if (drop < 0) return x;
        working.erase(working.begin() + drop);
        continue;
      }

      double alpha = 1.0;
      int blocking = -1;
      for (int i = 0; i < static_cast<int>(cons.size()); ++i) {
        if (cons[i].equality ||
            std::find(working.begin(), working.end(), i) != working.end()) {
          continue;
        }
        const double ap = cons[i].a.dot(p);
        if (ap >= -1e-12 * cons[i].a.norm() * p.norm()) continue;
        const double slack = std::max(0.0, cons[i].a.dot(x) - cons[i].b);
        const double step = slack / -ap;
        // Strict comparison keeps the smallest index on ties.
        if (step < alpha) {
          alpha = step;
          blocking = i;
        }
      }
      x += alpha * p;
      if (blocking >= 0) {
        working.push_back(blocking);
      } else {
        at_minimizer = true;
      }
    }
    throw std::runtime_error("oracle_solve: active-set iteration limit reached");
  }

 private:
  MatX H_;
  VecX c_;
};

void insert_angles(std::vector<double>& angles, double center, double half_width,
                   int count) {
  for (int j = 0; j < count; ++j) {
    double a = center - half_width + 2.0 * half_width * j / (count - 1);
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    angles.push_back(a);
  }
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-13; }),
               angles.end());
}

}  // namespace

Solution oracle_solve(const ConeProblem& problem, int grid) {
  const int m = problem.num_contacts();
  if (m < 1 || m > 3) throw std::invalid_argument("oracle_solve: needs 1 to 3 contacts");
  if (grid < 8) throw std::invalid_argument("oracle_solve: grid must be at least 8");
  const int n = 3 * m;

  Solution out;
  for (const ConeBounds& b : problem.bounds) {
    if (b.gamma_low > b.gamma_up + 1e-12 * std::max(1.0, b.gamma_up)) {
      out.f = VecX::Zero(n);
      out.status = SolveStatus::kInfeasible;
      out.objective_value = objective(problem, out.f);
      return out;
    }
  }

  // Objective |A f - G|^2 + beta1 |f - f_prev|^2 + beta2 |f|^2, expanded here.
  MatX A = MatX::Zero(3, n);
  for (int i = 0; i < m; ++i) {
    const ContactFrame& fr = problem.frames[i];
    A.col(3 * i) = fr.n;
    A.col(3 * i + 1) = fr.d;
    A.col(3 * i + 2) = fr.c;
  }
  const VecX f_prev = problem.f_prev.size() == n ? problem.f_prev : VecX::Zero(n);
  MatX H = 2.0 * A.transpose() * A;
  H.diagonal().array() += 2.0 * (problem.beta1 + problem.beta2) + 1e-12;
  const VecX c = -2.0 * (A.transpose() * problem.g_tilde + problem.beta1 * f_prev);
  const ActiveSetQp qp(H, c);

  std::vector<std::vector<double>> angles(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < grid; ++j) angles[i].push_back(kTwoPi * j / grid);
  }

  auto build = [&]() {
    std::vector<Constraint> cons;
    for (int i = 0; i < m; ++i) {
      const ConeBounds& b = problem.bounds[i];
      const int base = 3 * i;
      auto unit = [&](int var, double coeff) {
        VecX a = VecX::Zero(n);
        a[var] = coeff;
        return a;
      };
      if (b.gamma_up <= 0.0) {
        for (int k = 0; k < 3; ++k) cons.push_back({unit(base + k, 1.0), 0.0, true});
        continue;
      }
      if (b.gamma_up - b.gamma_low <= 1e-12 * std::max(1.0, b.gamma_up)) {
        cons.push_back({unit(base, 1.0), 0.5 * (b.gamma_low + b.gamma_up), true});
      } else {
        cons.push_back({unit(base, 1.0), b.gamma_low, false});
        cons.push_back({unit(base, -1.0), -b.gamma_up, false});
      }
      const std::vector<double>& v = angles[i];
      for (std::size_t j = 0; j < v.size(); ++j) {
        const double a0 = v[j];
        const double a1 = (j + 1 < v.size()) ? v[j + 1] : v[0] + kTwoPi;
        const double psi = 0.5 * (a0 + a1);
        VecX a = VecX::Zero(n);
        a[base] = b.mu_tilde * std::cos(0.5 * (a1 - a0));
        a[base + 1] = -std::cos(psi);
        a[base + 2] = -std::sin(psi);
        cons.push_back({a, 0.0, false});
      }
    }
    return cons;
  };

  VecX x = VecX::Zero(n);
  for (int i = 0; i < m; ++i) {
    const ConeBounds& b = problem.bounds[i];
    x[3 * i] = b.gamma_up <= 0.0 ? 0.0 : 0.5 * (b.gamma_low + b.gamma_up);
  }
  x = qp.solve(build(), x);

  double half_width = kTwoPi / grid;
  for (int round = 0; round < 2; ++round) {
    for (int i = 0; i < m; ++i) {
      const double ft = std::hypot(x[3 * i + 1], x[3 * i + 2]);
      if (ft <= 1e-12) continue;
      insert_angles(angles[i], std::atan2(x[3 * i + 2], x[3 * i + 1]), half_width, grid);
    }
    x = qp.solve(build(), x);
    half_width = 4.0 * half_width / (grid - 1);
  }

  out.f = x;
  out.status = SolveStatus::kOptimal;
  out.objective_value = objective(problem, x);
  out.max_cone_residual = max_residual(feasibility_residuals(problem, x));
  return out;
}

}  // namespace conegrasp
