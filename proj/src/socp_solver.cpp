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

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>
#ifdef CONEGRASP_SOLVER_TRACE
#include <cstdio>
#endif

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace conegrasp {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kMaxIters:
      return "max_iters";
    case SolveStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Constraint data in the standard conic form
//   G x + s = h,  s in R+^num_lp x Q3^num_soc,  A x = b.
struct ConicForm {
  int n = 0;
  int num_lp = 0;
  int num_soc = 0;
  MatX G;
  VecX h;
  MatX A;
  VecX b;
  std::vector<int> lp_var;     // variable bounded by each orthant row
  std::vector<int> soc_base;   // first variable of each cone block
  std::vector<double> soc_mu;

  int rows() const { return num_lp + 3 * num_soc; }
  int degree() const { return num_lp + num_soc; }
};

bool bounds_coincide(const ConeBounds& b) {
  return b.gamma_up - b.gamma_low <= 1e-12 * std::max(1.0, b.gamma_up);
}

ConicForm build_conic_form(const ConeProblem& problem) {
  ConicForm form;
  form.n = problem.dim();
  const int m = problem.num_contacts();

  struct Row {
    int var;
    double coeff;
    double rhs;
  };
  std::vector<Row> lp_rows;
  std::vector<std::pair<int, double>> soc_blocks;  // (contact, mu)
  std::vector<Row> eq_rows;

  for (int i = 0; i < m; ++i) {
    const ConeBounds& b = problem.bounds[i];
    const int base = 3 * i;
    if (b.gamma_up <= 0.0) {
      for (int k = 0; k < 3; ++k) eq_rows.push_back({base + k, 1.0, 0.0});
      continue;
    }
    if (bounds_coincide(b)) {
      eq_rows.push_back({base, 1.0, 0.5 * (b.gamma_low + b.gamma_up)});
    } else {
      lp_rows.push_back({base, -1.0, -b.gamma_low});  // f_n - gamma_low >= 0
      lp_rows.push_back({base, 1.0, b.gamma_up});     // gamma_up - f_n >= 0
    }
    soc_blocks.emplace_back(i, b.mu_tilde);
  }

  for (const Row& row : lp_rows) form.lp_var.push_back(row.var);
  for (const auto& [contact, mu] : soc_blocks) {
    form.soc_base.push_back(3 * contact);
    form.soc_mu.push_back(mu);
  }
  form.num_lp = static_cast<int>(lp_rows.size());
  form.num_soc = static_cast<int>(soc_blocks.size());
  form.G = MatX::Zero(form.rows(), form.n);
  form.h = VecX::Zero(form.rows());
  for (int r = 0; r < form.num_lp; ++r) {
    form.G(r, lp_rows[r].var) = lp_rows[r].coeff;
    form.h[r] = lp_rows[r].rhs;
  }
  for (int k = 0; k < form.num_soc; ++k) {
    const int row = form.num_lp + 3 * k;
    const int base = 3 * soc_blocks[k].first;
    form.G(row, base) = -soc_blocks[k].second;
    form.G(row + 1, base + 1) = -1.0;
    form.G(row + 2, base + 2) = -1.0;
  }
  form.A = MatX::Zero(static_cast<Eigen::Index>(eq_rows.size()), form.n);
  form.b = VecX::Zero(static_cast<Eigen::Index>(eq_rows.size()));
  for (std::size_t r = 0; r < eq_rows.size(); ++r) {
    form.A(static_cast<Eigen::Index>(r), eq_rows[r].var) = eq_rows[r].coeff;
    form.b[static_cast<Eigen::Index>(r)] = eq_rows[r].rhs;
  }
  return form;
}

// --- Cone arithmetic -------------------------------------------------------

double soc_min_eig(const Vec3& u) { return u[0] - u.tail<2>().norm(); }

double min_eig(const ConicForm& form, const VecX& u) {
  double lo = kInf;
  for (int r = 0; r < form.num_lp; ++r) lo = std::min(lo, u[r]);
  for (int k = 0; k < form.num_soc; ++k) {
    lo = std::min(lo, soc_min_eig(u.segment<3>(form.num_lp + 3 * k)));
  }
  return lo;
}

void add_identity_element(const ConicForm& form, VecX& u, double scale) {
  for (int r = 0; r < form.num_lp; ++r) u[r] += scale;
  for (int k = 0; k < form.num_soc; ++k) u[form.num_lp + 3 * k] += scale;
}

// Largest alpha with u + alpha * du in the cone (u interior).
double soc_max_step(const Vec3& u, const Vec3& du) {
  const double a = du[0] * du[0] - du.tail<2>().squaredNorm();
  const double b = 2.0 * (u[0] * du[0] - u.tail<2>().dot(du.tail<2>()));
  const double c = u[0] * u[0] - u.tail<2>().squaredNorm();
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1e-300});
  if (std::abs(a) <= 1e-14 * scale) {
    return b < 0.0 ? -c / b : kInf;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return kInf;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(sq, b));
  double r1 = q / a;
  double r2 = (q != 0.0) ? c / q : kInf;
  if (r1 > r2) std::swap(r1, r2);
  if (r1 > 0.0) return r1;
  if (r2 > 0.0) return r2;
  return kInf;
}

double max_step(const ConicForm& form, const VecX& u, const VecX& du) {
  double alpha = kInf;
  for (int r = 0; r < form.num_lp; ++r) {
    if (du[r] < 0.0) alpha = std::min(alpha, -u[r] / du[r]);
  }
  for (int k = 0; k < form.num_soc; ++k) {
    const int o = form.num_lp + 3 * k;
    alpha = std::min(alpha, soc_max_step(u.segment<3>(o), du.segment<3>(o)));
  }
  return alpha;
}

VecX jordan_product(const ConicForm& form, const VecX& u, const VecX& v) {
  VecX out(u.size());
  for (int r = 0; r < form.num_lp; ++r) out[r] = u[r] * v[r];
  for (int k = 0; k < form.num_soc; ++k) {
    const int o = form.num_lp + 3 * k;
    const Vec3 a = u.segment<3>(o);
    const Vec3 w = v.segment<3>(o);
    out[o] = a.dot(w);
    out.segment<2>(o + 1) = a[0] * w.tail<2>() + w[0] * a.tail<2>();
  }
  return out;
}

// Solves lambda o u = d for u.
VecX jordan_divide(const ConicForm& form, const VecX& lambda, const VecX& d) {
  VecX out(d.size());
  for (int r = 0; r < form.num_lp; ++r) out[r] = d[r] / lambda[r];
  for (int k = 0; k < form.num_soc; ++k) {
    const int o = form.num_lp + 3 * k;
    const Vec3 l = lambda.segment<3>(o);
    const Vec3 w = d.segment<3>(o);
    const double det = l[0] * l[0] - l.tail<2>().squaredNorm();
    const double u0 = (l[0] * w[0] - l.tail<2>().dot(w.tail<2>())) / det;
    out[o] = u0;
    out.segment<2>(o + 1) = (w.tail<2>() - u0 * l.tail<2>()) / l[0];
  }
  return out;
}

// Nesterov-Todd scaling: W z = W^{-1} s = lambda. Only W^{-1} is formed; the
// Newton system below is written in scaled variables so W itself is never
// needed. Block diagonal, kept dense because the problems are tiny.
struct Scaling {
  MatX W_inv;
  VecX lambda;
};

Scaling nt_scaling(const ConicForm& form, const VecX& s, const VecX& z) {
  const int rows = form.rows();
  Scaling sc;
  sc.W_inv = MatX::Zero(rows, rows);
  for (int r = 0; r < form.num_lp; ++r) {
    sc.W_inv(r, r) = std::sqrt(z[r] / s[r]);
  }
  for (int k = 0; k < form.num_soc; ++k) {
    const int o = form.num_lp + 3 * k;
    const Vec3 sk = s.segment<3>(o);
    const Vec3 zk = z.segment<3>(o);
    const double s_norm = std::sqrt(std::max(sk[0] * sk[0] - sk.tail<2>().squaredNorm(), 1e-300));
    const double z_norm = std::sqrt(std::max(zk[0] * zk[0] - zk.tail<2>().squaredNorm(), 1e-300));
    const Vec3 s_bar = sk / s_norm;
    const Vec3 z_bar = zk / z_norm;
    const double gamma = std::sqrt(0.5 * (1.0 + s_bar.dot(z_bar)));
    Vec3 w;
    w[0] = (s_bar[0] + z_bar[0]) / (2.0 * gamma);
    w.tail<2>() = (s_bar.tail<2>() - z_bar.tail<2>()) / (2.0 * gamma);
    const double eta = std::sqrt(s_norm / z_norm);

    const Eigen::Vector2d w1 = w.tail<2>();
    Mat3 block;
    block(0, 0) = w[0];
    block.block<1, 2>(0, 1) = -w1.transpose();
    block.block<2, 1>(1, 0) = -w1;
    block.block<2, 2>(1, 1) =
        Eigen::Matrix2d::Identity() + w1 * w1.transpose() / (1.0 + w[0]);
    sc.W_inv.block<3, 3>(o, o) = block / eta;
  }
  sc.lambda = sc.W_inv * s;
  return sc;
}

// Scaled Newton system, with Gs = W^{-1} G and dzs = W dz:
//   P dx + A^T dy + Gs^T dzs = bx
//   A dx                     = by
//   Gs dx - dzs              = bzs
// Reduced to (P + Gs^T Gs) dx = ... and polished by iterative refinement.
class NewtonSystem {
 public:
  NewtonSystem(const MatX& P, const ConicForm& form, const MatX& W_inv)
      : P_(P), A_(form.A), Gs_(W_inv * form.G) {
    MatX M = P_ + Gs_.transpose() * Gs_;
    M.diagonal().array() += 1e-14 * std::max(1.0, M.diagonal().maxCoeff());
    llt_.compute(M);
    has_eq_ = A_.rows() > 0;
    if (has_eq_) schur_.compute(A_ * llt_.solve(A_.transpose()));
  }

  void solve(const VecX& bx, const VecX& by, const VecX& bzs, VecX& dx, VecX& dy,
             VecX& dzs) const {
    solve_once(bx, by, bzs, dx, dy, dzs);
    for (int round = 0; round < 3; ++round) {
      const VecX ex = bx - P_ * dx - Gs_.transpose() * dzs -
                      (has_eq_ ? VecX(A_.transpose() * dy) : VecX::Zero(dx.size()));
      const VecX ey = has_eq_ ? VecX(by - A_ * dx) : VecX();
      const VecX ez = bzs - (Gs_ * dx - dzs);
      VecX cx, cy, cz;
      solve_once(ex, ey, ez, cx, cy, cz);
      dx += cx;
      if (has_eq_) dy += cy;
      dzs += cz;
    }
  }

 private:
  void solve_once(const VecX& bx, const VecX& by, const VecX& bzs, VecX& dx,
                  VecX& dy, VecX& dzs) const {
    const VecX r = bx + Gs_.transpose() * bzs;
    if (has_eq_) {
      dy = schur_.solve(A_ * llt_.solve(r) - by);
      dx = llt_.solve(r - A_.transpose() * dy);
    } else {
      dy.resize(0);
      dx = llt_.solve(r);
    }
    dzs = Gs_ * dx - bzs;
  }

  const MatX& P_;
  const MatX& A_;
  MatX Gs_;
  Eigen::LLT<MatX> llt_;
  Eigen::LDLT<MatX> schur_;
  bool has_eq_ = false;
};


// Interior-point iterates approach a degenerate optimum only at the rate of
// sqrt(gap), so the converged point is refined on the active set it
// identifies. Each orthant pair and cone pair is classified by comparing the
// eigenvalues of s with the complementary ones of z; the resulting
// equality-constrained problem (linear rows plus |f_t|^2 = mu^2 f_n^2 on
// boundary cones) is solved by Newton's method on its KKT system. The result
// is only returned when it is feasible, its multipliers have the right signs
// and it does not raise the objective, which certifies global optimality.
std::optional<VecX> polish(const ConeProblem& problem, const ConicForm& form,
                           const QuadraticForm& qf, const VecX& x0, const VecX& s,
                           const VecX& z, double objective_slack) {
  const int n = form.n;
  std::vector<VecX> lin_a;
  std::vector<double> lin_b;
  std::vector<bool> lin_signed;  // multiplier must be non-negative
  std::vector<int> surface;      // cone blocks held on the boundary
  std::vector<int> apex;         // cone blocks pinned at the origin
  std::vector<bool> pinned(n, false);

  for (int k = 0; k < form.num_soc; ++k) {
    const Vec3 sk = s.segment<3>(form.num_lp + 3 * k);
    const Vec3 zk = z.segment<3>(form.num_lp + 3 * k);
    const double s_lo = sk[0] - sk.tail<2>().norm(), s_hi = sk[0] + sk.tail<2>().norm();
    const double z_lo = zk[0] - zk.tail<2>().norm(), z_hi = zk[0] + zk.tail<2>().norm();
    if (s_hi <= z_lo) {
      apex.push_back(k);
      for (int j = 0; j < 3; ++j) pinned[form.soc_base[k] + j] = true;
    } else if (s_lo < z_hi) {
      surface.push_back(k);
    }
  }
  for (int r = 0; r < form.A.rows(); ++r) {
    for (int j = 0; j < n; ++j) {
      if (form.A(r, j) != 0.0 && pinned[j]) return std::nullopt;
    }
    lin_a.push_back(form.A.row(r).transpose());
    lin_b.push_back(form.b[r]);
    lin_signed.push_back(false);
  }
  for (int r = 0; r < form.num_lp; ++r) {
    if (!(s[r] < z[r]) || pinned[form.lp_var[r]]) continue;
    lin_a.push_back(form.G.row(r).transpose());
    lin_b.push_back(form.h[r]);
    lin_signed.push_back(true);
  }
  for (int k : apex) {
    for (int j = 0; j < 3; ++j) {
      lin_a.push_back(VecX::Unit(n, form.soc_base[k] + j));
      lin_b.push_back(0.0);
      lin_signed.push_back(false);
    }
  }

  const int nl = static_cast<int>(lin_a.size());
  const int ns = static_cast<int>(surface.size());
  const int dim = n + nl + ns;
  VecX x = x0;
  VecX lambda = VecX::Zero(nl);
  VecX nu(ns);
  for (int i = 0; i < ns; ++i) {
    const int k = surface[i];
    const double fn = x[form.soc_base[k]];
    if (!(fn > 0.0)) return std::nullopt;
    nu[i] = z[form.num_lp + 3 * k] / (form.soc_mu[k] * fn);
  }

  bool converged = false;
  for (int iter = 0; iter < 20 && !converged; ++iter) {
    MatX K = MatX::Zero(dim, dim);
    VecX rhs = VecX::Zero(dim);
    K.topLeftCorner(n, n) = qf.P;
    rhs.head(n) = -(qf.P * x + qf.q);
    for (int j = 0; j < nl; ++j) {
      K.block(0, n + j, n, 1) = lin_a[j];
      K.block(n + j, 0, 1, n) = lin_a[j].transpose();
      rhs[n + j] = lin_b[j] - lin_a[j].dot(x);
    }
    for (int i = 0; i < ns; ++i) {
      const int k = surface[i];
      const int base = form.soc_base[k];
      const double mu = form.soc_mu[k];
      // c(f) = (|f_t|^2 - mu^2 f_n^2) / 2 <= 0.
      const Vec3 grad(-mu * mu * x[base], x[base + 1], x[base + 2]);
      K(base, base) -= nu[i] * mu * mu;
      K(base + 1, base + 1) += nu[i];
      K(base + 2, base + 2) += nu[i];
      K.block<3, 1>(base, n + nl + i) = grad;
      K.block<1, 3>(n + nl + i, base) = grad.transpose();
      rhs[n + nl + i] = -0.5 * (x.segment<2>(base + 1).squaredNorm() - mu * mu * x[base] * x[base]);
    }
    const Eigen::FullPivLU<MatX> lu(K);
    if (lu.rank() < dim) return std::nullopt;
    const VecX sol = lu.solve(rhs);
    if (!sol.allFinite()) return std::nullopt;
    const VecX dx = sol.head(n);
    x += dx;
    lambda = sol.segment(n, nl);
    nu = sol.tail(ns);
    converged = dx.norm() <= 1e-14 * (1.0 + x.norm());
  }
  if (!converged) return std::nullopt;

  const double dual_tol = 1e-9 * (1.0 + qf.q.norm() + qf.P.norm() * x.norm());
  for (int j = 0; j < nl; ++j) {
    if (lin_signed[j] && lambda[j] < -dual_tol) return std::nullopt;
  }
  for (int i = 0; i < ns; ++i) {
    if (nu[i] < -dual_tol || !(x[form.soc_base[surface[i]]] > 0.0)) return std::nullopt;
  }
  const VecX grad = qf.P * x + qf.q;
  for (int k : apex) {
    const int base = form.soc_base[k];
    if (grad[base] < form.soc_mu[k] * grad.segment<2>(base + 1).norm() - dual_tol) {
      return std::nullopt;
    }
  }
  const double scale = 1.0 + x.norm();
  if (form.A.rows() && (form.A * x - form.b).norm() > 1e-12 * scale) return std::nullopt;
  if (max_residual(feasibility_residuals(problem, x)) > 1e-12 * scale) return std::nullopt;
  if (objective(problem, x) > objective(problem, x0) + objective_slack) return std::nullopt;
  return x;
}

Solution finish(const ConeProblem& problem, const VecX& x, SolveStatus status,
                int iterations, double gap) {
  Solution out;
  out.f = x;
  out.status = status;
  out.iterations = iterations;
  out.objective_value = objective(problem, x);
  out.max_cone_residual = max_residual(feasibility_residuals(problem, x));
  out.duality_gap = gap;
  return out;
}

// Interior iterations allowed past convergence while waiting for the polish.
constexpr int kExtraIterations = 15;

}  // namespace

Solution solve(const ConeProblem& problem, const SolverSettings& settings) {
  const int n = problem.dim();
  for (const ConeBounds& b : problem.bounds) {
    if (b.gamma_low > b.gamma_up + 1e-12 * std::max(1.0, b.gamma_up)) {
      return finish(problem, VecX::Zero(n), SolveStatus::kInfeasible, 0, 0.0);
    }
  }

  const ConicForm form = build_conic_form(problem);
  const QuadraticForm qf = quadratic_form(problem);
  const int rows = form.rows();

  VecX x(n), y(form.A.rows()), z(rows), s(rows);
  {
    const NewtonSystem init(qf.P, form, MatX::Identity(rows, rows));
    init.solve(-qf.q, form.b, form.h, x, y, z);
    if (settings.warm_start && problem.f_prev.size() == n &&
        problem.f_prev.squaredNorm() > 0.0) {
      x = problem.f_prev;
    }
    s = form.h - form.G * x;
    const double ts = -min_eig(form, s);
    if (ts >= -1e-8 * std::max(1.0, s.norm())) add_identity_element(form, s, 1.0 + ts);
    const double tz = -min_eig(form, z);
    if (tz >= -1e-8 * std::max(1.0, z.norm())) add_identity_element(form, z, 1.0 + tz);
  }

  const double res_x_scale = std::max(1.0, qf.q.norm());
  const double res_z_scale = std::max(1.0, form.h.norm());
  const double res_y_scale = std::max(1.0, form.b.size() ? form.b.norm() : 0.0);
  VecX identity = VecX::Zero(rows);
  add_identity_element(form, identity, 1.0);

  double gap = s.dot(z);
  // Set once the tolerances hold. When the active set is still ambiguous
  // there, a few more interior iterations usually settle it for the polish.
  std::optional<VecX> converged;
  int converged_iter = 0;
  double converged_gap = 0.0;
  int extra_iters = 0;
  for (int iter = 0; iter < settings.max_iters; ++iter) {
    const VecX r_x = qf.P * x + qf.q + form.A.transpose() * y + form.G.transpose() * z;
    const VecX r_y = form.A * x - form.b;
    const VecX r_z = form.G * x + s - form.h;
    gap = s.dot(z);

    const double pres = std::max(r_z.norm() / res_z_scale,
                                 r_y.size() ? r_y.norm() / res_y_scale : 0.0);
    const double dres = r_x.norm() / res_x_scale;
    const double energy = 0.5 * x.dot(qf.P * x) + qf.q.dot(x) + qf.constant;
    if (pres <= settings.feas_tol && dres <= settings.feas_tol &&
        gap <= settings.opt_tol * (1.0 + std::abs(energy)) &&
        max_residual(feasibility_residuals(problem, x)) <= settings.feas_tol) {
      if (std::optional<VecX> refined =
              polish(problem, form, qf, x, s, z, settings.opt_tol * (1.0 + std::abs(energy)))) {
        return finish(problem, *refined, SolveStatus::kOptimal, iter, gap);
      }
      if (!converged) converged_iter = iter;
      converged = x;
      converged_gap = gap;
      if (++extra_iters > kExtraIterations ||
          gap <= 1e-6 * settings.opt_tol * (1.0 + std::abs(energy))) {
        return finish(problem, x, SolveStatus::kOptimal, converged_iter, gap);
      }
    }
#ifdef CONEGRASP_SOLVER_TRACE
    std::fprintf(stderr, "it %d pres %.3e dres %.3e gap %.3e E %.6e\n", iter, pres,
                 dres, gap, energy);
#endif

    const Scaling sc = nt_scaling(form, s, z);
    const NewtonSystem kkt(qf.P, form, sc.W_inv);
    const VecX scaled_rz = sc.W_inv * r_z;
    const double mu = gap / form.degree();

    // Solves the linearized system for a given complementarity target d_s:
    // lambda o (W^{-1} ds + W dz) = d_s.
    auto direction = [&](const VecX& d_s, VecX& dx, VecX& dy, VecX& dz, VecX& ds,
                         VecX& dzs) {
      const VecX u = jordan_divide(form, sc.lambda, d_s);
      kkt.solve(-r_x, -r_y, -scaled_rz - u, dx, dy, dzs);
      dz = sc.W_inv * dzs;
      ds = -r_z - form.G * dx;
    };

    // Predictor.
    const VecX lambda_sq = jordan_product(form, sc.lambda, sc.lambda);
    VecX dx, dy, dz, ds, dzs;
    direction(-lambda_sq, dx, dy, dz, ds, dzs);
    const double alpha_aff =
        std::min(1.0, std::min(max_step(form, s, ds), max_step(form, z, dz)));
    const double rho = (s + alpha_aff * ds).dot(z + alpha_aff * dz) / gap;
    const double sigma = std::pow(std::clamp(rho, 0.0, 1.0), 3);

    // Corrector.
    const VecX cross = jordan_product(form, sc.W_inv * ds, dzs);
    direction(-lambda_sq - cross + sigma * mu * identity, dx, dy, dz, ds, dzs);
    const double alpha =
        std::min(1.0, 0.99 * std::min(max_step(form, s, ds), max_step(form, z, dz)));
    if (!(alpha > 1e-14) || !dx.allFinite()) {
      if (converged) {
        return finish(problem, *converged, SolveStatus::kOptimal, converged_iter, converged_gap);
      }
      return finish(problem, x, SolveStatus::kMaxIters, iter + 1, gap);
    }
    x += alpha * dx;
    if (y.size()) y += alpha * dy;
    z += alpha * dz;
    s += alpha * ds;
  }
  if (converged) {
    return finish(problem, *converged, SolveStatus::kOptimal, converged_iter, converged_gap);
  }
  return finish(problem, x, SolveStatus::kMaxIters, settings.max_iters, gap);
}

}  // namespace conegrasp
