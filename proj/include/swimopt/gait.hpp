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

// Parameterized swimming motion
//
//   theta_p(s, t) = (sum_{i=0..5} s^i p_{i+1}) * sin(p_12 t + sum_{i=0..4} s^i p_{i+7})
//
// s is the arc-length fraction along the midline (0 = head, 1 = tail) and
// theta is the counterclockwise-positive angle between adjacent segments.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "swimopt/errors.hpp"

namespace swimopt::gait {

inline constexpr std::size_t kNumAmplitude = 6;
inline constexpr std::size_t kNumPhase = 5;
inline constexpr std::size_t kNumParams = kNumAmplitude + kNumPhase + 1;

using Gradient = std::array<double, kNumParams>;

/// The 12 gait parameters in p_1..p_12 order: amplitude polynomial
/// coefficients (powers s^0..s^5), phase polynomial coefficients
/// (powers s^0..s^4), angular frequency omega.
class ParamVector {
 public:
  ParamVector(const std::array<double, kNumAmplitude>& amp,
              const std::array<double, kNumPhase>& phase, double omega) {
    for (std::size_t i = 0; i < kNumAmplitude; ++i) p_[i] = amp[i];
    for (std::size_t i = 0; i < kNumPhase; ++i) p_[kNumAmplitude + i] = phase[i];
    p_[kNumParams - 1] = omega;
    validate();
  }

  /// From a flat array in p_1..p_12 order. Rejects non-finite entries and omega <= 0.
  static ParamVector from_flat(std::span<const double> flat) {
    if (flat.size() != kNumParams) {
      throw DomainError("ParamVector needs " + std::to_string(kNumParams) + " entries, got " +
                        std::to_string(flat.size()));
    }
    ParamVector p;
    for (std::size_t i = 0; i < kNumParams; ++i) p.p_[i] = flat[i];
    p.validate();
    return p;
  }

  const std::array<double, kNumParams>& flat() const { return p_; }
  double operator[](std::size_t i) const { return p_[i]; }

  std::span<const double, kNumAmplitude> amp_coeffs() const {
    return std::span<const double, kNumAmplitude>(p_.data(), kNumAmplitude);
  }
  std::span<const double, kNumPhase> phase_coeffs() const {
    return std::span<const double, kNumPhase>(p_.data() + kNumAmplitude, kNumPhase);
  }
  double omega() const { return p_[kNumParams - 1]; }
  double period() const { return 2.0 * M_PI / omega(); }

  /// Copy with amplitude coefficients multiplied by `factor`.
  ParamVector scaled_amplitude(double factor) const {
    ParamVector q = *this;
    for (std::size_t i = 0; i < kNumAmplitude; ++i) q.p_[i] *= factor;
    return q;
  }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  ParamVector() = default;

  void validate() const {
    for (std::size_t i = 0; i < kNumParams; ++i) {
      if (!std::isfinite(p_[i])) {
        throw DomainError("ParamVector entry p_" + std::to_string(i + 1) + " is not finite");
      }
    }
    if (!(omega() > 0.0)) throw DomainError("ParamVector omega must be > 0");
  }

  std::array<double, kNumParams> p_{};
};

namespace detail {

inline double horner(std::span<const double> coeffs, double s) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * s + coeffs[i];
  return acc;
}

inline void check_s(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("arc-length fraction s must lie in [0,1]");
}

}  // namespace detail

inline double amplitude(const ParamVector& p, double s) {
  return detail::horner(p.amp_coeffs(), s);
}

inline double phase(const ParamVector& p, double s, double t) {
  return p.omega() * t + detail::horner(p.phase_coeffs(), s);
}

inline double eval_theta(const ParamVector& p, double s, double t) {
  detail::check_s(s);
  return amplitude(p, s) * std::sin(phase(p, s, t));
}

/// Analytic d theta / d p_k for k = 1..12.
inline Gradient eval_theta_grad_p(const ParamVector& p, double s, double t) {
  detail::check_s(s);
  const double amp = amplitude(p, s);
  const double ph = phase(p, s, t);
  const double sn = std::sin(ph);
  const double dphase = amp * std::cos(ph);
  Gradient g{};
  double si = 1.0;
  for (std::size_t i = 0; i < kNumAmplitude; ++i, si *= s) {
    g[i] = si * sn;
    if (i < kNumPhase) g[kNumAmplitude + i] = dphase * si;
  }
  g[kNumParams - 1] = dphase * t;
  return g;
}

/// Arc-length fraction of interior joint j (1-based) on a uniformly segmented midline.
inline double joint_position(std::size_t j, std::size_t n_joints) {
  return static_cast<double>(j) / static_cast<double>(n_joints + 1);
}

inline std::vector<double> joint_angles(const ParamVector& p, double t, std::size_t n_joints) {
  if (n_joints < 1) throw DomainError("joint_angles needs at least one joint");
  std::vector<double> out(n_joints);
  for (std::size_t j = 0; j < n_joints; ++j) out[j] = eval_theta(p, joint_position(j + 1, n_joints), t);
  return out;
}

/// Artifact-chosen default undulation: amplitude growing toward the tail and
/// a linear phase lag giving roughly one wavelength along the body.
inline ParamVector default_gait() {
  return ParamVector({0.10, 0.10, 0.0, 0.0, 0.0, 0.0}, {0.0, -6.0, 0.0, 0.0, 0.0}, 2.0 * M_PI);
}

}  // namespace swimopt::gait
