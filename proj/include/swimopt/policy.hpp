// Copyright 2026 The swimopt Authors
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

#pragma once

// Observations and the bounded additive augmentation policy.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "swimopt/errors.hpp"
#include "swimopt/gait.hpp"
#include "swimopt/kinematics.hpp"

namespace swimopt::opt {

inline constexpr std::size_t kNumHarmonics = 3;
inline constexpr std::size_t kNumObservedJoints = 5;
inline constexpr std::size_t kObservationDim = 2 * kNumHarmonics + kNumObservedJoints + 1 + 2 + 2;

struct Observation {
  // (sin, cos) for harmonics 1..3 of the gait period
  std::array<double, 2 * kNumHarmonics> time_encoding{};
  std::array<double, kNumObservedJoints> midline_angles{};
  double heading = 0.0;
  Vec2 com_position;
  Vec2 com_velocity;

  std::array<double, kObservationDim> flat() const {
    std::array<double, kObservationDim> v{};
    std::size_t k = 0;
    for (double x : time_encoding) v[k++] = x;
    for (double x : midline_angles) v[k++] = x;
    v[k++] = heading;
    v[k++] = com_position.x;
    v[k++] = com_position.y;
    v[k++] = com_velocity.x;
    v[k++] = com_velocity.y;
    return v;
  }
};

/// 0-based indices of the observed joints; {3, 7, 10, 13, 17} (1-based) of 19.
inline std::array<std::size_t, kNumObservedJoints> observed_joints(std::size_t n_joints) {
  constexpr std::array<double, kNumObservedJoints> frac{3.0 / 20, 7.0 / 20, 10.0 / 20, 13.0 / 20, 17.0 / 20};
  std::array<std::size_t, kNumObservedJoints> idx{};
  for (std::size_t k = 0; k < kNumObservedJoints; ++k) {
    const auto j = static_cast<std::size_t>(std::lround(frac[k] * static_cast<double>(n_joints + 1)));
    idx[k] = std::clamp<std::size_t>(j, 1, n_joints) - 1;
  }
  return idx;
}

inline Observation make_observation(const kin::SwimmerState& state, const gait::ParamVector& baseline) {
  Observation obs;
  const double period = baseline.period();
  const double phase = 2.0 * M_PI * std::fmod(state.time, period) / period;
  for (std::size_t h = 0; h < kNumHarmonics; ++h) {
    const double a = static_cast<double>(h + 1) * phase;
    obs.time_encoding[2 * h] = std::sin(a);
    obs.time_encoding[2 * h + 1] = std::cos(a);
  }
  if (!state.joint_angles.empty()) {
    const auto idx = observed_joints(state.joint_angles.size());
    for (std::size_t k = 0; k < kNumObservedJoints; ++k) obs.midline_angles[k] = state.joint_angles[idx[k]];
  }
  obs.heading = state.heading;
  obs.com_position = state.com_position;
  obs.com_velocity = state.com_velocity;
  return obs;
}

/// delta = epsilon * tanh(W obs + b); every delta lies in [-epsilon, epsilon].
class AugmentationPolicy {
 public:
  AugmentationPolicy(std::size_t n_joints, double epsilon)
      : n_joints_(n_joints), epsilon_(epsilon), params_(n_joints * (kObservationDim + 1), 0.0) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be finite and >= 0");
  }

  static std::size_t param_count(std::size_t n_joints) { return n_joints * (kObservationDim + 1); }

  std::size_t n_joints() const { return n_joints_; }
  double epsilon() const { return epsilon_; }

  // Row-major weights (n_joints x kObservationDim) followed by n_joints biases.
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  std::vector<double> deltas(const Observation& obs) const {
    const auto x = obs.flat();
    std::vector<double> out(n_joints_);
    const double* bias = params_.data() + n_joints_ * kObservationDim;
    for (std::size_t j = 0; j < n_joints_; ++j) {
      const double* row = params_.data() + j * kObservationDim;
      double raw = bias[j];
      for (std::size_t k = 0; k < kObservationDim; ++k) raw += row[k] * x[k];
      out[j] = epsilon_ * std::tanh(raw);
    }
    return out;
  }

  friend bool operator==(const AugmentationPolicy&, const AugmentationPolicy&) = default;

 private:
  std::size_t n_joints_;
  double epsilon_;
  std::vector<double> params_;
};

}  // namespace swimopt::opt
