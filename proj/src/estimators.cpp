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

#include "conegrasp/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace conegrasp {

EstimatorState EstimatorState::initial(const EstimatorConfig& config) {
  if (config.mu_window < 1 || config.g_window < 1) {
    throw std::invalid_argument("estimator windows must hold at least one sample");
  }
  if (!(config.mu_init > 0.0)) {
    throw std::invalid_argument("mu_init must be positive");
  }
  EstimatorState state;
  state.mu_capacity = static_cast<std::size_t>(config.mu_window);
  state.g_capacity = static_cast<std::size_t>(config.g_window);
  state.mu_window.assign(state.mu_capacity, config.mu_init);
  state.g_window.assign(state.g_capacity, config.g_init);
  state.mu_tilde = config.mu_init;
  state.g_tilde = config.g_init;
  return state;
}

std::optional<double> instantaneous_friction(std::span<const Vec3> measured,
                                             double min_normal) {
  double sum = 0.0;
  int count = 0;
  for (const Vec3& f : measured) {
    if (f[0] < min_normal) continue;
    sum += std::hypot(f[1], f[2]) / f[0];
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

std::optional<Vec3> instantaneous_gravity(std::span<const Vec3> measured,
                                          std::span<const ContactFrame> frames,
                                          double a_vertical) {
  if (measured.size() != frames.size()) {
    throw std::invalid_argument("instantaneous_gravity: force/frame count mismatch");
  }
  if (!(a_vertical > -kGravity)) return std::nullopt;
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < measured.size(); ++i) {
    sum += local_to_world(frames[i], measured[i]);
  }
  return (kGravity / (kGravity + a_vertical)) * sum;
}

EstimatorState filter_update(EstimatorState state, std::optional<double> mu_hat,
                             std::optional<Vec3> g_hat) {
  if (mu_hat) {
    state.mu_window.push_back(*mu_hat);
    while (state.mu_window.size() > state.mu_capacity) state.mu_window.pop_front();
    state.mu_tilde = *std::max_element(state.mu_window.begin(), state.mu_window.end());
  }
  if (g_hat) {
    state.g_window.push_back(*g_hat);
    while (state.g_window.size() > state.g_capacity) state.g_window.pop_front();
    Vec3 sum = Vec3::Zero();
    for (const Vec3& g : state.g_window) sum += g;
    state.g_tilde = sum / static_cast<double>(state.g_window.size());
  }
  return state;
}

}  // namespace conegrasp
