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

// Force-model interface and the resistive-force (anisotropic drag) model
// used as ground truth.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "swimopt/errors.hpp"
#include "swimopt/kinematics.hpp"

namespace swimopt::hydro {

inline constexpr std::size_t kMaxHistory = 3;

/// Everything a force model may look at for one step.
struct ForceQuery {
  // Pose and rigid-body rates before the step.
  const kin::SwimmerState* state = nullptr;
  // outlines[0] is the current outline, outlines[k] the one k steps back.
  // Missing history entries repeat the oldest available outline.
  std::array<const kin::Outline*, kMaxHistory + 1> outlines{};
  double dt = 0.0;
};

/// (current outline, up to 3 past outlines, dt) -> world-frame surface forces.
/// Implementations are immutable after construction.
class ForceModel {
 public:
  virtual ~ForceModel() = default;

  /// Number of past outlines the model reads.
  virtual std::size_t history_length() const = 0;

  virtual kin::SurfaceForces compute(const ForceQuery& query) const = 0;

  virtual void compute_batch(std::span<const ForceQuery> queries, std::span<kin::SurfaceForces> out) const {
    for (std::size_t i = 0; i < queries.size(); ++i) out[i] = compute(queries[i]);
  }
};

class DragCoefficients {
 public:
  DragCoefficients() = default;
  DragCoefficients(double c_tangent, double c_normal) : c_tangent_(c_tangent), c_normal_(c_normal) {
    if (!(c_tangent_ > 0.0) || !(c_normal_ > 0.0)) throw DomainError("drag coefficients must be > 0");
    if (c_normal_ < c_tangent_) throw DomainError("c_normal must be >= c_tangent");
  }
  double c_tangent() const { return c_tangent_; }
  double c_normal() const { return c_normal_; }

 private:
  double c_tangent_ = 1.0;
  double c_normal_ = 2.0;
};

/// World-frame velocity of every outline point: COM translation, rotation
/// and backward-difference body-frame deformation.
inline std::array<Vec2, kin::kOutlinePoints> point_velocities(const kin::Outline& current,
                                                              const kin::Outline& previous, double dt,
                                                              const kin::SwimmerState& state) {
  const double c = std::cos(state.heading), s = std::sin(state.heading);
  std::array<Vec2, kin::kOutlinePoints> u;
  for (std::size_t i = 0; i < kin::kOutlinePoints; ++i) {
    const Vec2 r = rotate(current.points[i], c, s);
    const Vec2 deform = rotate(current.points[i] - previous.points[i], c, s) * (1.0 / dt);
    u[i] = state.com_velocity + perp(r) * state.angular_velocity + deform;
  }
  return u;
}

/// force_i = -ds_i (c_t (u.t)t + c_n (u.n)n) with t the central-difference
/// tangent and ds_i half the length of the two adjacent chords.
inline kin::SurfaceForces resistive_forces(const kin::Outline& current, const kin::Outline& previous, double dt,
                                           const DragCoefficients& coeffs, const kin::SwimmerState& state) {
  if (!(dt > 0.0)) throw DomainError("resistive_forces: dt must be > 0");
  constexpr std::size_t n = kin::kOutlinePoints;
  const auto u = point_velocities(current, previous, dt, state);
  const double c = std::cos(state.heading), s = std::sin(state.heading);
  kin::SurfaceForces out;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& prev = current.points[(i + n - 1) % n];
    const Vec2& next = current.points[(i + 1) % n];
    const double ds = 0.5 * (norm(next - current.points[i]) + norm(current.points[i] - prev));
    Vec2 tangent = rotate(next - prev, c, s);
    tangent *= 1.0 / norm(tangent);
    const Vec2 normal = perp(tangent);
    const double ut = dot(u[i], tangent), un = dot(u[i], normal);
    out.forces[i] = -ds * (coeffs.c_tangent() * ut * tangent + coeffs.c_normal() * un * normal);
  }
  return out;
}

class ResistiveForceModel final : public ForceModel {
 public:
  explicit ResistiveForceModel(DragCoefficients coeffs = {}) : coeffs_(coeffs) {}

  std::size_t history_length() const override { return 1; }

  kin::SurfaceForces compute(const ForceQuery& q) const override {
    const kin::Outline* previous = q.outlines[1] ? q.outlines[1] : q.outlines[0];
    return resistive_forces(*q.outlines[0], *previous, q.dt, coeffs_, *q.state);
  }

  const DragCoefficients& coefficients() const { return coeffs_; }

 private:
  DragCoefficients coeffs_;
};

}  // namespace swimopt::hydro
