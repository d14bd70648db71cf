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

#ifndef CONEGRASP_CONTACT_GEOMETRY_HPP_
#define CONEGRASP_CONTACT_GEOMETRY_HPP_

#include <functional>
#include <span>
#include <vector>

#include "conegrasp/types.hpp"

namespace conegrasp {

// Orthonormal contact basis. `n` is the inward surface normal (the direction a
// pushing fingertip force points), `d` and `c` span the tangent plane and
// n = d x c. Local force coordinates are ordered (normal, d, c).
struct ContactFrame {
  Vec3 position = Vec3::Zero();
  Vec3 n = Vec3::UnitZ();
  Vec3 d = Vec3::UnitX();
  Vec3 c = Vec3::UnitY();

  // Columns [n d c]; maps local force coordinates to world coordinates.
  Mat3 local_to_world_matrix() const {
    Mat3 m;
    m.col(0) = n;
    m.col(1) = d;
    m.col(2) = c;
    return m;
  }
};

// Line about which an object is rotated. `direction` has unit norm.
struct RotationAxis {
  Vec3 point = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();

  // Normalizes `direction`; throws DegenerateInputError for a zero vector.
  static RotationAxis through(const Vec3& point, const Vec3& direction);
};

inline constexpr double kDefaultCollinearTolerance = 1e-6;

// Completes `normal` into a right-handed frame. The helper axis is the world
// axis least aligned with the normal (later axes win ties), d = e x n
// normalized, c = n x d.
ContactFrame build_contact_frame(const Vec3& position, const Vec3& normal);

Vec3 local_to_world(const ContactFrame& frame, const Vec3& f_local);
Vec3 world_to_local(const ContactFrame& frame, const Vec3& f_world);

// R(theta) * o - o for a point rotated about `axis`.
Vec3 slip_displacement(const Vec3& point, const RotationAxis& axis,
                       double theta);

// Distance from `point` to the axis line.
double distance_to_axis(const Vec3& point, const RotationAxis& axis);

// max_i 2 |sin(theta / 2)| r_i. Throws std::invalid_argument when empty.
double rotational_slip_bound(std::span<const Vec3> contacts,
                             const RotationAxis& axis, double theta);

// True iff every point lies within `tol` of the least-squares line through
// the set. Sets with fewer than three points are trivially collinear.
bool is_collinear(std::span<const Vec3> contacts,
                  double tol = kDefaultCollinearTolerance);

// Residual of the deformable no-slip conditions for a contact expressed in
// axis-aligned coordinates (rotation about x through the origin):
// max over samples of |n_x| + |n_y y_theta + n_z z_theta| / sqrt(y^2 + z^2).
// Zero only when the normal co-rotates with the object. Diagnostic only.
double corotation_violation(const Vec3& contact,
                            const std::function<Vec3(double)>& normal_trajectory,
                            std::span<const double> theta_samples);

}  // namespace conegrasp

#endif  // CONEGRASP_CONTACT_GEOMETRY_HPP_
