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

// Episode execution: gait (+ optional augmentation) -> outline -> force model
// -> rigid-body update, one step at a time. Several episodes can be stepped
// in lockstep so batched force models see one query per episode per step.

#include <algorithm>
#include <array>
#include <cstddef>
#include <exception>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "swimopt/errors.hpp"
#include "swimopt/gait.hpp"
#include "swimopt/hydro.hpp"
#include "swimopt/kinematics.hpp"
#include "swimopt/policy.hpp"

namespace swimopt::sim {

inline constexpr std::size_t kStepsPerPeriod = 200;

/// Integrator step tied to the gait period, dt = T / steps_per_period.
inline double default_dt(const gait::ParamVector& p, std::size_t steps_per_period = kStepsPerPeriod) {
  return p.period() / static_cast<double>(steps_per_period);
}

struct EpisodeSpec {
  gait::ParamVector gait = gait::default_gait();
  const opt::AugmentationPolicy* policy = nullptr;
  std::size_t n_steps = 0;
  double dt = 0.0;  // 0 selects default_dt(gait)
  double initial_heading = 0.0;
  bool record_surfaces = false;
};

/// states[k] is the state after k steps (states[0] is the initial rest state).
/// When surfaces are recorded, outlines[k] belongs to states[k] and forces[k]
/// is the force field applied during step k (forces[0] is zero).
struct Trajectory {
  double dt = 0.0;
  std::vector<kin::SwimmerState> states;
  std::vector<kin::Outline> outlines;
  std::vector<kin::SurfaceForces> forces;

  Vec2 displacement() const { return states.back().com_position - states.front().com_position; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct EpisodeResult {
  Trajectory trajectory;
  std::exception_ptr error;  // set when the episode aborted
};

namespace detail {

struct Running {
  const EpisodeSpec* spec;
  Trajectory traj;
  std::array<kin::Outline, hydro::kMaxHistory + 1> ring;  // ring[k % 4] = outline at step k
  kin::SwimmerState state;
  std::exception_ptr error;
  bool active = true;
};

}  // namespace detail

/// Runs all episodes in lockstep against one force model. A failing episode
/// is marked with its error and dropped; the others continue.
inline std::vector<EpisodeResult> run_episodes(std::span<const EpisodeSpec> specs, const hydro::ForceModel& model,
                                               const kin::BodyGeometry& geometry) {
  const std::size_t n_joints = geometry.n_joints();
  std::vector<detail::Running> runs(specs.size());
  std::size_t max_steps = 0;
  for (std::size_t e = 0; e < specs.size(); ++e) {
    const EpisodeSpec& spec = specs[e];
    if (spec.n_steps < 1) throw DomainError("episode needs n_steps >= 1");
    if (spec.policy && spec.policy->n_joints() != n_joints) throw DomainError("policy joint count mismatch");
    auto& r = runs[e];
    r.spec = &spec;
    r.traj.dt = spec.dt > 0.0 ? spec.dt : default_dt(spec.gait);
    r.state.heading = kin::wrap_angle(spec.initial_heading);
    r.state.joint_angles = gait::joint_angles(spec.gait, 0.0, n_joints);
    try {
      r.ring[0] = kin::outline_from_angles(r.state.joint_angles, geometry);
    } catch (...) {
      r.error = std::current_exception();
      r.active = false;
      continue;
    }
    r.traj.states.reserve(spec.n_steps + 1);
    r.traj.states.push_back(r.state);
    if (spec.record_surfaces) {
      r.traj.outlines.reserve(spec.n_steps + 1);
      r.traj.forces.reserve(spec.n_steps + 1);
      r.traj.outlines.push_back(r.ring[0]);
      r.traj.forces.push_back(kin::SurfaceForces{});
    }
    max_steps = std::max(max_steps, spec.n_steps);
  }

  constexpr std::size_t ring_size = hydro::kMaxHistory + 1;
  std::vector<hydro::ForceQuery> queries;
  std::vector<std::size_t> owners;
  std::vector<kin::SurfaceForces> forces;
  for (std::size_t k = 0; k < max_steps; ++k) {
    queries.clear();
    owners.clear();
    for (std::size_t e = 0; e < runs.size(); ++e) {
      auto& r = runs[e];
      if (!r.active || k >= r.spec->n_steps) continue;
      const double t_next = static_cast<double>(k + 1) * r.traj.dt;
      std::vector<double> angles = gait::joint_angles(r.spec->gait, t_next, n_joints);
      if (r.spec->policy) {
        const auto deltas = r.spec->policy->deltas(opt::make_observation(r.state, r.spec->gait));
        const double eps = r.spec->policy->epsilon();
        for (std::size_t j = 0; j < n_joints; ++j) {
          if (!(std::abs(deltas[j]) <= eps)) throw std::logic_error("augmentation delta exceeds epsilon");
          angles[j] += deltas[j];
        }
      }
      try {
        r.ring[(k + 1) % ring_size] = kin::outline_from_angles(angles, geometry);
      } catch (const GeometryError& ex) {
        r.error = std::make_exception_ptr(GeometryError("step " + std::to_string(k + 1) + ": " + ex.what()));
        r.active = false;
        continue;
      }
      r.state.joint_angles = std::move(angles);
      hydro::ForceQuery q;
      q.state = &r.state;
      q.dt = r.traj.dt;
      for (std::size_t h = 0; h <= hydro::kMaxHistory; ++h) {
        const std::size_t back = std::min(h, k + 1);  // pad with the oldest outline
        q.outlines[h] = &r.ring[(k + 1 - back) % ring_size];
      }
      queries.push_back(q);
      owners.push_back(e);
    }
    if (queries.empty()) continue;
    forces.resize(queries.size());
    try {
      model.compute_batch(queries, forces);
    } catch (const std::exception& ex) {
      for (std::size_t e : owners) {
        runs[e].error = std::make_exception_ptr(SimulationError(k + 1, ex.what()));
        runs[e].active = false;
      }
      continue;
    }
    for (std::size_t i = 0; i < owners.size(); ++i) {
      auto& r = runs[owners[i]];
      const kin::Outline& outline = r.ring[(k + 1) % ring_size];
      kin::SwimmerState next = kin::integrate_step(r.state, forces[i], outline, geometry, r.traj.dt);
      next.time = static_cast<double>(k + 1) * r.traj.dt;
      r.state = std::move(next);
      r.traj.states.push_back(r.state);
      if (r.spec->record_surfaces) {
        r.traj.outlines.push_back(outline);
        r.traj.forces.push_back(forces[i]);
      }
    }
  }

  std::vector<EpisodeResult> out(runs.size());
  for (std::size_t e = 0; e < runs.size(); ++e) {
    out[e].trajectory = std::move(runs[e].traj);
    out[e].error = runs[e].error;
  }
  return out;
}

/// Single episode; rethrows the episode's error.
inline Trajectory step_episode(const EpisodeSpec& spec, const hydro::ForceModel& model,
                               const kin::BodyGeometry& geometry) {
  auto results = run_episodes(std::span<const EpisodeSpec>(&spec, 1), model, geometry);
  if (results[0].error) std::rethrow_exception(results[0].error);
  return std::move(results[0].trajectory);
}

}  // namespace swimopt::sim
