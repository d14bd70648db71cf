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

#ifndef CONEGRASP_TYPES_HPP_
#define CONEGRASP_TYPES_HPP_

#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace conegrasp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Standard gravity used throughout the controller and the simulator (N/kg).
inline constexpr double kGravity = 9.8;

// Raised when an input sits on a geometric singularity (zero-length normal,
// contact on the rotation axis, ...).
class DegenerateInputError : public std::invalid_argument {
 public:
  explicit DegenerateInputError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Rigid placement: world_point = position + orientation * local_point.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Vec3 apply(const Vec3& local) const { return position + orientation * local; }
  Vec3 inverse_apply(const Vec3& world) const {
    return orientation.conjugate() * (world - position);
  }
};

}  // namespace conegrasp

#endif  // CONEGRASP_TYPES_HPP_
