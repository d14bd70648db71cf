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

#include "conegrasp/contact_geometry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace conegrasp {

RotationAxis RotationAxis::through(const Vec3& point, const Vec3& direction) {
  const double norm = direction.norm();
  if (!(norm > 1e-12)) {
    throw DegenerateInputError("rotation axis direction has zero length");
  }
  return RotationAxis{point, direction / norm};
}

ContactFrame build_contact_frame(const Vec3& position, const Vec3& normal) {
  const double norm = normal.norm();
  if (!(norm > 1e-9)) {
    throw DegenerateInputError("contact normal has zero length");
  }
  const Vec3 n = normal / norm;

  int axis = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(n[k]) <= std::abs(n[axis])) axis = k;
  }
  const Vec3 e = Vec3::Unit(axis);

  ContactFrame frame;
  frame.position = position;
  frame.n = n;
  frame.d = e.cross(n).normalized();
  frame.c = n.cross(frame.d);
  if (frame.d.cross(frame.c).dot(n) < 0.0) std::swap(frame.d, frame.c);
  return frame;
}

Vec3 local_to_world(const ContactFrame& frame, const Vec3& f_local) {
  return f_local[0] * frame.n + f_local[1] * frame.d + f_local[2] * frame.c;
}

Vec3 world_to_local(const ContactFrame& frame, const Vec3& f_world) {
  return {frame.n.dot(f_world), frame.d.dot(f_world), frame.c.dot(f_world)};
}

Vec3 slip_displacement(const Vec3& point, const RotationAxis& axis,
                       double theta) {
  const Vec3 rel = point - axis.point;
  const Eigen::AngleAxisd rotation(theta, axis.direction);
  Vec3 delta = rotation * rel - rel;
  // Strip round-off along the axis; the exact displacement has none.
  delta -= delta.dot(axis.direction) * axis.direction;
  return delta;
}

double distance_to_axis(const Vec3& point, const RotationAxis& axis) {
  const Vec3 rel = point - axis.point;
  return (rel - rel.dot(axis.direction) * axis.direction).norm();
}

double rotational_slip_bound(std::span<const Vec3> contacts,
                             const RotationAxis& axis, double theta) {
  if (contacts.empty()) {
    throw std::invalid_argument("rotational_slip_bound: no contacts");
  }
  const double chord = 2.0 * std::abs(std::sin(0.5 * theta));
  double bound = 0.0;
  for (const Vec3& p : contacts) {
    bound = std::max(bound, chord * distance_to_axis(p, axis));
  }
  return bound;
}

bool is_collinear(std::span<const Vec3> contacts, double tol) {
  if (contacts.size() < 3) return true;
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : contacts) centroid += p;
  centroid /= static_cast<double>(contacts.size());

  Eigen::MatrixX3d centered(contacts.size(), 3);
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    centered.row(static_cast<Eigen::Index>(i)) = (contacts[i] - centroid).transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixX3d> svd(centered, Eigen::ComputeFullV);
  const Vec3 direction = svd.matrixV().col(0);

  double worst = 0.0;
  for (const Vec3& p : contacts) {
    const Vec3 rel = p - centroid;
    worst = std::max(worst, (rel - rel.dot(direction) * direction).norm());
  }
  return worst <= tol;
}

double corotation_violation(const Vec3& contact,
                            const std::function<Vec3(double)>& normal_trajectory,
                            std::span<const double> theta_samples) {
  const double y = contact.y();
  const double z = contact.z();
  const double radius = std::hypot(y, z);
  if (!(radius > 0.0)) {
    throw DegenerateInputError("corotation_violation: contact lies on the axis");
  }
  double worst = 0.0;
  for (double theta : theta_samples) {
    const Vec3 n = normal_trajectory(theta);
    const double y_theta = y * std::cos(theta) - z * std::sin(theta);
    const double z_theta = y * std::sin(theta) + z * std::cos(theta);
    const double residual =
        std::abs(n.x()) + std::abs(n.y() * y_theta + n.z() * z_theta) / radius;
    worst = std::max(worst, residual);
  }
  return worst;
}

}  // namespace conegrasp
