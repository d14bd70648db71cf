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

#ifndef CONEGRASP_ESTIMATORS_HPP_
#define CONEGRASP_ESTIMATORS_HPP_

#include <deque>
#include <optional>
#include <span>

#include "conegrasp/contact_geometry.hpp"
#include "conegrasp/types.hpp"

namespace conegrasp {

inline constexpr double kDefaultMinNormal = 0.05;  // N
inline constexpr double kDefaultMuInit = 0.4;
inline constexpr double kDefaultWeightInit = 0.02 * kGravity;  // 20 g

struct EstimatorConfig {
  int mu_window = 15;
  int g_window = 10;
  double mu_init = kDefaultMuInit;
  Vec3 g_init = Vec3(0.0, 0.0, kDefaultWeightInit);
  double min_normal = kDefaultMinNormal;
};

// Sliding windows plus the current estimates. Both windows start full of
// their initial value, so the estimates are defined from the first tick.
struct EstimatorState {
  std::deque<double> mu_window;
  std::deque<Vec3> g_window;
  std::size_t mu_capacity = 0;
  std::size_t g_capacity = 0;
  double mu_tilde = kDefaultMuInit;
  Vec3 g_tilde = Vec3::Zero();

  // Throws std::invalid_argument for non-positive window lengths or mu_init.
  static EstimatorState initial(const EstimatorConfig& config);
};

// Mean tangential-to-normal ratio over contacts whose normal component is at
// least `min_normal`; nullopt when none qualifies.
std::optional<double> instantaneous_friction(std::span<const Vec3> measured,
                                             double min_normal = kDefaultMinNormal);

// g / (g + a) times the world-frame sum of the measured contact forces.
// nullopt when a <= -g. Throws std::invalid_argument on a size mismatch.
std::optional<Vec3> instantaneous_gravity(std::span<const Vec3> measured,
                                          std::span<const ContactFrame> frames,
                                          double a_vertical);

// Pushes the available samples and recomputes mu_tilde (window max) and
// g_tilde (window mean). A missing sample leaves its window untouched.
EstimatorState filter_update(EstimatorState state, std::optional<double> mu_hat,
                             std::optional<Vec3> g_hat);

}  // namespace conegrasp

#endif  // CONEGRASP_ESTIMATORS_HPP_
