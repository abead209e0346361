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

// Parameter-sweep training data for the surrogate: stacked outline history
// (current + 3 past, body frame) paired with body-frame surface forces.

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "swimopt/errors.hpp"
#include "swimopt/gait.hpp"
#include "swimopt/hydro.hpp"
#include "swimopt/kinematics.hpp"
#include "swimopt/simulate.hpp"
#include "swimopt/surrogate/network.hpp"

namespace swimopt::surrogate {

inline constexpr std::size_t kHistoryFrames = hydro::kMaxHistory + 1;
inline constexpr std::size_t kInputDim = kHistoryFrames * kin::kOutlinePoints * 2;
inline constexpr std::size_t kOutputDim = kin::kOutlinePoints * 2;

/// Writes outlines (current first, then 1..3 steps back) as x0,y0,x1,y1,...
inline void stack_outlines(std::span<const kin::Outline* const> frames, std::span<double> out) {
  std::size_t k = 0;
  for (const kin::Outline* o : frames) {
    for (const auto& p : o->points) {
      out[k++] = p.x;
      out[k++] = p.y;
    }
  }
}

/// World-frame forces rotated into the body frame of `heading`, flattened.
inline void body_frame_forces(const kin::SurfaceForces& world, double heading, std::span<double> out) {
  const double c = std::cos(-heading), s = std::sin(-heading);
  for (std::size_t i = 0; i < kin::kOutlinePoints; ++i) {
    const Vec2 f = rotate(world.forces[i], c, s);
    out[2 * i] = f.x;
    out[2 * i + 1] = f.y;
  }
}

struct GaitRecord {
  gait::ParamVector params;
  std::vector<kin::Outline> outlines;       // per state, body frame
  std::vector<Eigen::VectorXd> body_forces;  // per state, force applied during the step into it
};

struct SampleRef {
  std::size_t gait;
  std::size_t step;  // >= 3 so that three past outlines exist
};

class ForceDataset {
 public:
  std::vector<GaitRecord> gaits;
  std::vector<SampleRef> samples;
  std::vector<std::size_t> train;  // sample indices
  std::vector<std::size_t> test;
  std::vector<std::size_t> test_gaits;
  Standardizer input_scaler;
  Standardizer target_scaler;

  std::size_t size() const { return samples.size(); }

  void input(std::size_t sample, std::span<double> out) const {
    const auto& ref = samples[sample];
    const auto& g = gaits[ref.gait];
    std::array<const kin::Outline*, kHistoryFrames> frames{};
    for (std::size_t h = 0; h < kHistoryFrames; ++h) frames[h] = &g.outlines[ref.step - h];
    stack_outlines(frames, out);
  }

  std::span<const double> target(std::size_t sample) const {
    const auto& ref = samples[sample];
    const auto& f = gaits[ref.gait].body_forces[ref.step];
    return {f.data(), static_cast<std::size_t>(f.size())};
  }

  /// Columns of standardized inputs and physical targets for the given samples.
  void batch(std::span<const std::size_t> idx, Eigen::MatrixXd& x, Eigen::MatrixXd& t) const {
    const auto n = static_cast<Eigen::Index>(idx.size());
    x.resize(kInputDim, n);
    t.resize(kOutputDim, n);
    for (Eigen::Index b = 0; b < n; ++b) {
      input(idx[static_cast<std::size_t>(b)], std::span<double>(x.col(b).data(), kInputDim));
      const auto tg = target(idx[static_cast<std::size_t>(b)]);
      std::copy(tg.begin(), tg.end(), t.col(b).data());
    }
    input_scaler.normalize_inplace(x);
  }

  /// Per-feature statistics of the training split only.
  void fit_scalers() {
    Eigen::VectorXd s_in = Eigen::VectorXd::Zero(kInputDim), q_in = s_in;
    Eigen::VectorXd s_out = Eigen::VectorXd::Zero(kOutputDim), q_out = s_out;
    Eigen::VectorXd buf(kInputDim);
    for (std::size_t i : train) {
      input(i, std::span<double>(buf.data(), kInputDim));
      s_in += buf;
      q_in += buf.cwiseProduct(buf);
      const auto tg = target(i);
      const ConstVectorMap t(tg.data(), kOutputDim);
      s_out += t;
      q_out += t.cwiseProduct(t);
    }
    const double n = static_cast<double>(std::max<std::size_t>(train.size(), 1));
    input_scaler = Standardizer::from_moments(s_in, q_in, n);
    target_scaler = Standardizer::from_moments(s_out, q_out, n);
  }
};

/// Simulates every gait with the oracle for `n_steps`, keeps samples from
/// the 4th state on, holds out floor(G/5) whole gaits for testing and fits
/// the standardizers on the training split.
inline ForceDataset generate_dataset(std::span<const gait::ParamVector> sweep, const kin::BodyGeometry& geometry,
                                     const hydro::ForceModel& oracle, std::size_t n_steps, std::uint64_t split_seed) {
  if (sweep.empty()) throw DomainError("generate_dataset: empty sweep");
  if (n_steps < kHistoryFrames) throw DomainError("generate_dataset: episode too short for history");
  ForceDataset data;
  data.gaits.reserve(sweep.size());
  for (std::size_t g = 0; g < sweep.size(); ++g) {
    sim::EpisodeSpec spec;
    spec.gait = sweep[g];
    spec.n_steps = n_steps;
    spec.record_surfaces = true;
    sim::Trajectory traj;
    try {
      traj = sim::step_episode(spec, oracle, geometry);
    } catch (const std::exception& e) {
      throw std::runtime_error("sweep gait " + std::to_string(g) + ": " + e.what());
    }
    GaitRecord rec{sweep[g], std::move(traj.outlines), {}};
    rec.body_forces.resize(traj.forces.size());
    for (std::size_t k = 0; k < traj.forces.size(); ++k) {
      rec.body_forces[k].resize(kOutputDim);
      // forces of step k were computed in the pose of state k-1
      const double heading = traj.states[k == 0 ? 0 : k - 1].heading;
      body_frame_forces(traj.forces[k], heading, std::span<double>(rec.body_forces[k].data(), kOutputDim));
    }
    data.gaits.push_back(std::move(rec));
  }

  std::vector<std::size_t> order(sweep.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(split_seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_test = sweep.size() / 5;
  data.test_gaits.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::sort(data.test_gaits.begin(), data.test_gaits.end());

  for (std::size_t g = 0; g < sweep.size(); ++g) {
    const bool held_out = std::binary_search(data.test_gaits.begin(), data.test_gaits.end(), g);
    for (std::size_t k = kHistoryFrames - 1; k <= n_steps; ++k) {
      (held_out ? data.test : data.train).push_back(data.samples.size());
      data.samples.push_back({g, k});
    }
  }
  data.fit_scalers();
  return data;
}

}  // namespace swimopt::surrogate
