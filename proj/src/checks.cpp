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

#include "conegrasp/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "conegrasp/cone_program.hpp"
#include "conegrasp/contact_geometry.hpp"
#include "conegrasp/estimators.hpp"
#include "conegrasp/hand_model.hpp"
#include "conegrasp/socp_solver.hpp"

namespace conegrasp {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  Vec3 box(double half) { return {uniform(-half, half), uniform(-half, half), uniform(-half, half)}; }
  Vec3 unit() {
    std::normal_distribution<double> normal;
    Vec3 v;
    do {
      v = Vec3(normal(rng_), normal(rng_), normal(rng_));
    } while (v.norm() < 1e-6);
    return v.normalized();
  }

 private:
  std::mt19937_64 rng_;
};

// Random allocation problem shaped like the acceptance instances: shared
// friction estimate, optional lower bounds and a reachable target wrench.
ConeProblem random_problem(Sampler& s, int m) {
  std::vector<ContactFrame> frames;
  std::vector<ConeBounds> bounds;
  const double mu = s.uniform(0.2, 1.2);
  for (int i = 0; i < m; ++i) {
    frames.push_back(build_contact_frame(s.box(0.05), s.unit()));
    ConeBounds b;
    b.mu_tilde = mu;
    b.gamma_up = kDefaultGammaUp;
    b.gamma_low = s.uniform(0.0, 1.0) < 0.3 ? s.uniform(0.0, 1.0) : 0.0;
    bounds.push_back(b);
  }
  const Vec3 g = s.unit() * s.uniform(0.0, 1.0) * m * mu * kDefaultGammaUp * 0.5;
  VecX f_prev = VecX::Zero(3 * m);
  if (s.uniform(0.0, 1.0) < 0.35) {
    for (int i = 0; i < 3 * m; ++i) f_prev[i] = s.uniform(-1.0, 1.0);
  }
  return assemble(std::move(frames), std::move(bounds), g, f_prev, s.uniform(0.0, 0.1),
                  s.uniform(0.0, 0.01));
}

CheckResult make_result(const char* name, int samples) {
  CheckResult r;
  r.name = name;
  r.passed = true;
  r.samples = samples;
  return r;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

}  // namespace

CheckResult check_rotational_slip_lemma(int samples, std::uint64_t seed) {
  const auto start = Clock::now();
  Sampler s(seed);
  CheckResult r = make_result("rotational_slip_lemma", samples);
  double min_bound = INFINITY;
  for (int k = 0; k < samples; ++k) {
    std::vector<Vec3> pts;
    do {
      pts = {s.box(0.1), s.box(0.1), s.box(0.1)};
    } while (is_collinear(pts));
    const RotationAxis axis = RotationAxis::through(s.box(0.1), s.unit());
    const double theta = s.uniform(1e-3, 2.0 * std::numbers::pi - 1e-3);

    const double bound = rotational_slip_bound(pts, axis, theta);
    min_bound = std::min(min_bound, bound);
    if (!(bound > 0.0)) r.passed = false;
    for (const Vec3& p : pts) {
      // Distance to the axis from the cross product, independent of the
      // projection used inside the library.
      const double radius = (p - axis.point).cross(axis.direction).norm();
      const double expected = 2.0 * std::abs(std::sin(0.5 * theta)) * radius;
      const double err = std::abs(slip_displacement(p, axis, theta).norm() - expected);
      r.worst = std::max(r.worst, err);
    }
  }
  if (r.worst > 1e-9) r.passed = false;
  r.seconds = seconds_since(start);
  r.detail = fmt("min bound %.3e m, max |dd| error %.3e m", min_bound, r.worst);
  return r;
}

CheckResult check_contact_frames(int samples, std::uint64_t seed) {
  const auto start = Clock::now();
  Sampler s(seed);
  CheckResult r = make_result("contact_frames", samples);
  for (int k = 0; k < samples; ++k) {
    const Vec3 normal = s.unit() * s.uniform(1e-3, 10.0);
    const ContactFrame f = build_contact_frame(s.box(1.0), normal);
    double err = 0.0;
    err = std::max(err, std::abs(f.n.norm() - 1.0));
    err = std::max(err, std::abs(f.d.norm() - 1.0));
    err = std::max(err, std::abs(f.c.norm() - 1.0));
    err = std::max(err, std::abs(f.n.dot(f.d)));
    err = std::max(err, std::abs(f.n.dot(f.c)));
    err = std::max(err, std::abs(f.d.dot(f.c)));
    err = std::max(err, (f.d.cross(f.c) - f.n).norm());
    err = std::max(err, (f.n - normal.normalized()).norm());
    const Vec3 v = s.box(5.0);
    err = std::max(err, (local_to_world(f, world_to_local(f, v)) - v).norm() / (1.0 + v.norm()));
    r.worst = std::max(r.worst, err);
  }
  r.passed = r.worst <= 1e-12;
  r.seconds = seconds_since(start);
  r.detail = fmt("max orthonormality/handedness/round-trip error %.3e", r.worst);
  return r;
}

CheckResult check_solver_against_oracle(int instances, std::uint64_t seed, int grid) {
  const auto start = Clock::now();
  Sampler s(seed);
  CheckResult r = make_result("solver_vs_oracle", instances);
  double worst_residual = 0.0;
  int not_optimal = 0;
  for (int k = 0; k < instances; ++k) {
    const ConeProblem p = random_problem(s, 2 + k % 2);
    const Solution sol = solve(p);
    const Solution ref = oracle_solve(p, grid);
    if (sol.status != SolveStatus::kOptimal) ++not_optimal;
    const double gap =
        std::abs(sol.objective_value - ref.objective_value) / (1.0 + std::abs(ref.objective_value));
    r.worst = std::max(r.worst, gap);
    worst_residual = std::max(worst_residual, max_residual(feasibility_residuals(p, sol.f)));
  }
  r.passed = not_optimal == 0 && r.worst <= 1e-3 && worst_residual <= 1e-6;
  r.seconds = seconds_since(start);
  r.detail = fmt("max relative gap %.3e, max residual %.3e, non-optimal %.0f", r.worst,
                 worst_residual, not_optimal);
  return r;
}

CheckResult check_solve_latency(int trials, std::uint64_t seed, double budget_ms) {
  Sampler s(seed);
  CheckResult r = make_result("solve_latency_m4", trials);
  std::vector<double> times;
  times.reserve(trials);
  const auto start = Clock::now();
  int not_optimal = 0;
  for (int k = 0; k < trials; ++k) {
    // Thumb opposing three fingers on a box, with measured loads feeding the
    // adaptive bounds as in the control loop.
    std::vector<ContactFrame> frames;
    frames.push_back(build_contact_frame(Vec3(0.0, -0.03, s.uniform(-0.01, 0.01)), Vec3::UnitY()));
    for (int i = 0; i < 3; ++i) {
      frames.push_back(build_contact_frame(Vec3(0.03 * (i - 1), 0.03, s.uniform(-0.01, 0.01)),
                                           -Vec3::UnitY() + 0.1 * s.box(1.0)));
    }
    const double mu = s.uniform(0.3, 1.0);
    std::vector<Vec3> measured;
    for (int i = 0; i < 4; ++i) measured.push_back(Vec3(0.5, s.uniform(-0.2, 0.2), s.uniform(-0.2, 0.2)));
    VecX f_prev(12);
    for (int i = 0; i < 4; ++i) f_prev.segment<3>(3 * i) = measured[i];
    const Vec3 g(0.0, 0.0, s.uniform(0.3, 1.5));

    const auto t0 = Clock::now();
    ConeProblem p = assemble(frames, adaptive_lower_bounds(measured, mu, kDefaultGammaUp), g,
                             f_prev, kDefaultBeta1, kDefaultBeta2);
    const Solution sol = solve(p);
    times.push_back(1e3 * seconds_since(t0));
    if (sol.status != SolveStatus::kOptimal) ++not_optimal;
  }
  std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
  r.worst = times.empty() ? 0.0 : times[times.size() / 2];
  r.passed = not_optimal == 0 && r.worst <= budget_ms;
  r.seconds = seconds_since(start);
  r.detail = fmt("median %.4f ms (budget %.1f ms), non-optimal %.0f", r.worst, budget_ms, not_optimal);
  return r;
}

CheckResult check_solver_scaling(int instances, std::uint64_t seed) {
  const auto start = Clock::now();
  Sampler s(seed);
  CheckResult r = make_result("solver_scaling", instances);
  bool deterministic = true;
  for (int k = 0; k < instances; ++k) {
    ConeProblem p = random_problem(s, 2 + k % 3);
    p.beta2 = std::max(p.beta2, 1e-3);
    const double scale = s.uniform(0.25, 4.0);
    ConeProblem q = p;
    q.g_tilde *= scale;
    q.f_prev *= scale;
    for (ConeBounds& b : q.bounds) {
      b.gamma_low *= scale;
      b.gamma_up *= scale;
    }
    const Solution a = solve(p);
    const Solution b = solve(q);
    const Solution again = solve(p);
    if (again.f != a.f || again.iterations != a.iterations) deterministic = false;
    const double err = (b.f - scale * a.f).norm() / (1.0 + scale * a.f.norm());
    r.worst = std::max(r.worst, err);
  }
  r.passed = deterministic && r.worst <= 1e-6;
  r.seconds = seconds_since(start);
  r.detail = fmt("max relative scaling error %.3e, deterministic %.0f", r.worst, deterministic);
  return r;
}

CheckResult check_objective_convexity(int samples, std::uint64_t seed) {
  const auto start = Clock::now();
  Sampler s(seed);
  CheckResult r = make_result("objective_convexity", samples);
  for (int k = 0; k < samples; ++k) {
    const ConeProblem p = random_problem(s, 1 + k % 4);
    VecX f(p.dim()), g(p.dim());
    for (int i = 0; i < p.dim(); ++i) {
      f[i] = s.uniform(-3.0, 3.0);
      g[i] = s.uniform(-3.0, 3.0);
    }
    const double lambda = s.uniform(0.0, 1.0);
    const double lhs = objective(p, lambda * f + (1.0 - lambda) * g);
    const double rhs = lambda * objective(p, f) + (1.0 - lambda) * objective(p, g);
    r.worst = std::max(r.worst, lhs - rhs);
  }
  r.passed = r.worst <= 1e-9;
  r.seconds = seconds_since(start);
  r.detail = fmt("max convexity excess %.3e", r.worst);
  return r;
}

CheckResult check_estimation_identities(int streams, std::uint64_t seed) {
  const auto start = Clock::now();
  Sampler s(seed);
  CheckResult r = make_result("estimation_identities", streams);
  const EstimatorConfig config;
  for (int k = 0; k < streams; ++k) {
    const int m = 2 + k % 3;
    const double mass = s.uniform(0.02, 0.5);
    const Vec3 weight(0.0, 0.0, mass * kGravity);
    // Half the streams are static, the rest ride a constant vertical
    // acceleration that the contacts must supply on top of the weight.
    const double accel = (k % 2 == 0) ? 0.0 : s.uniform(-0.8 * kGravity, 2.0 * kGravity);
    EstimatorState state = EstimatorState::initial(config);
    for (int tick = 0; tick < config.g_window + 3; ++tick) {
      std::vector<ContactFrame> frames;
      std::vector<Vec3> local;
      Vec3 sum = Vec3::Zero();
      for (int i = 0; i < m; ++i) {
        frames.push_back(build_contact_frame(s.box(0.05), s.unit()));
        if (i + 1 < m) {
          const Vec3 w = s.box(1.0);
          sum += w;
          local.push_back(world_to_local(frames.back(), w));
        }
      }
      // The last contact closes the balance exactly.
      const Vec3 required = weight * (kGravity + accel) / kGravity;
      local.push_back(world_to_local(frames.back(), required - sum));
      const std::optional<Vec3> g_hat = instantaneous_gravity(local, frames, accel);
      state = filter_update(std::move(state), instantaneous_friction(local), g_hat);
    }
    r.worst = std::max(r.worst, std::abs(state.g_tilde.norm() / weight.norm() - 1.0));
    r.worst = std::max(r.worst, (state.g_tilde - weight).norm() / weight.norm());
  }
  r.passed = r.worst <= 1e-6;
  r.seconds = seconds_since(start);
  r.detail = fmt("max |G~/G - 1| %.3e", r.worst);
  return r;
}

CheckResult check_jacobian(int configurations, std::uint64_t seed) {
  const auto start = Clock::now();
  Sampler s(seed);
  CheckResult r = make_result("jacobian_fd_and_duality", configurations);
  const HandKinematics hand = default_hand();
  const int joints = hand.num_joints();
  std::vector<int> fingers(hand.num_fingers());
  for (int i = 0; i < hand.num_fingers(); ++i) fingers[i] = i;
  constexpr double kStep = 1e-7;
  double worst_duality = 0.0;
  for (int k = 0; k < configurations; ++k) {
    VecX q(joints);
    for (int j = 0; j < joints; ++j) {
      // Keep the forward step inside the limits so clamping never bites.
      q[j] = s.uniform(hand.joint_limits[j].lo + 1e-3, hand.joint_limits[j].hi - 1e-3);
    }
    const MatX J = contact_jacobian(hand, q, fingers);
    const std::vector<Vec3> base = forward_kinematics(hand, q);
    for (int j = 0; j < joints; ++j) {
      VecX qp = q;
      qp[j] += kStep;
      const std::vector<Vec3> moved = forward_kinematics(hand, qp);
      for (int i = 0; i < hand.num_fingers(); ++i) {
        const Vec3 fd = (moved[i] - base[i]) / kStep;
        r.worst = std::max(r.worst, (fd - J.block<3, 1>(3 * i, j)).cwiseAbs().maxCoeff());
      }
    }
    VecX f(J.rows()), qdot(joints);
    for (int i = 0; i < f.size(); ++i) f[i] = s.uniform(-2.0, 2.0);
    for (int j = 0; j < joints; ++j) qdot[j] = s.uniform(-1.0, 1.0);
    const double lhs = (J.transpose() * f).dot(qdot);
    const double rhs = f.dot(J * qdot);
    worst_duality = std::max(worst_duality, std::abs(lhs - rhs));
  }
  r.passed = r.worst <= 1e-5 && worst_duality <= 1e-10;
  r.seconds = seconds_since(start);
  r.detail = fmt("max finite-difference error %.3e, max duality error %.3e", r.worst,
                 worst_duality);
  return r;
}

std::vector<CheckResult> run_property_suite(std::uint64_t seed) {
  return {
      check_rotational_slip_lemma(10000, seed),
      check_contact_frames(100000, seed + 1),
      check_objective_convexity(10000, seed + 2),
      check_solver_against_oracle(500, seed + 3),
      check_solver_scaling(200, seed + 4),
      check_solve_latency(201, seed + 5),
      check_estimation_identities(200, seed + 6),
      check_jacobian(1000, seed + 7),
  };
}

std::string format_check(const CheckResult& result) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "[%s] %-26s n=%-6d %8.3f s  %s",
                result.passed ? "PASS" : "FAIL", result.name.c_str(), result.samples,
                result.seconds, result.detail.c_str());
  return buf;
}

}  // namespace conegrasp
