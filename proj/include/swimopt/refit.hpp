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

// Projection of an augmented motion back onto the gait parameters:
// record joint angles over the last period and minimize
//
//   L(p) = mean_{s,t} (theta*(s,t) - theta_p(s,t))^2
//
// by gradient descent from the baseline parameters.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "swimopt/errors.hpp"
#include "swimopt/gait.hpp"
#include "swimopt/kinematics.hpp"
#include "swimopt/simulate.hpp"

namespace swimopt::refit {

struct AngleSample {
  double s = 0.0;
  double t = 0.0;
  double theta_star = 0.0;
};

struct AngleTargets {
  std::vector<AngleSample> samples;
  double period = 0.0;
};

inline constexpr std::size_t kDefaultTimeSamples = 50;

/// theta* at every joint for `time_samples` uniformly spaced states covering
/// the final full period of the trajectory (state stride = steps per period /
/// time_samples, ending at the last state).
inline AngleTargets collect_targets(const sim::Trajectory& traj, const kin::BodyGeometry& geometry,
                                    const gait::ParamVector& baseline,
                                    std::size_t time_samples = kDefaultTimeSamples) {
  if (time_samples == 0) throw DomainError("collect_targets: need at least one time sample");
  const double period = baseline.period();
  const auto steps_per_period = static_cast<std::size_t>(std::llround(period / traj.dt));
  const std::size_t n_steps = traj.states.empty() ? 0 : traj.states.size() - 1;
  if (n_steps < steps_per_period || steps_per_period == 0) {
    throw EpisodeTooShortError("trajectory shorter than one gait period");
  }
  const std::size_t n_joints = geometry.n_joints();
  AngleTargets out;
  out.period = period;
  out.samples.reserve(time_samples * n_joints);
  for (std::size_t m = time_samples; m-- > 0;) {
    // states n - m*stride, strides spread over one period
    const std::size_t back = m * steps_per_period / time_samples;
    const auto& st = traj.states[n_steps - back];
    if (st.joint_angles.size() != n_joints) throw DomainError("trajectory joint count mismatch");
    for (std::size_t j = 0; j < n_joints; ++j) {
      out.samples.push_back({gait::joint_position(j + 1, n_joints), st.time, st.joint_angles[j]});
    }
  }
  return out;
}

/// Mean squared angle error of p over the targets.
inline double angle_loss(const AngleTargets& targets, const gait::ParamVector& p) {
  double sum = 0.0;
  for (const auto& a : targets.samples) {
    const double r = a.theta_star - gait::eval_theta(p, a.s, a.t);
    sum += r * r;
  }
  return sum / static_cast<double>(targets.samples.size());
}

struct DescentConfig {
  std::size_t max_iterations = 5000;
  double step = 0.5;            // in whitened coordinates, where the Hessian is ~2I near init
  double loss_tolerance = 1e-20;
  double grad_tolerance = 1e-10;  // whitened gradient norm
  std::size_t max_halvings = 60;
  std::size_t rewhiten_every = 20;  // refresh the metric at the current iterate
};

struct FitResult {
  gait::ParamVector params;
  double loss = 0.0;
  double initial_loss = 0.0;
  std::size_t iterations = 0;
  std::vector<double> loss_trace;  // accepted iterates, starting with the init loss
};

namespace detail {

inline double loss_and_grad(const AngleTargets& targets, const gait::ParamVector& p, Eigen::VectorXd& grad) {
  grad.setZero(gait::kNumParams);
  double sum = 0.0;
  for (const auto& a : targets.samples) {
    const double r = a.theta_star - gait::eval_theta(p, a.s, a.t);
    const auto g = gait::eval_theta_grad_p(p, a.s, a.t);
    sum += r * r;
    for (std::size_t k = 0; k < gait::kNumParams; ++k) grad[static_cast<Eigen::Index>(k)] -= 2.0 * r * g[k];
  }
  const double inv = 1.0 / static_cast<double>(targets.samples.size());
  grad *= inv;
  return sum * inv;
}

// M = (J^T J / N + ridge)^(-1/2) at the initial parameters; gradient
// descent runs on q with p = p0 + M q.
inline Eigen::MatrixXd whitening(const AngleTargets& targets, const gait::ParamVector& p0) {
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(gait::kNumParams, gait::kNumParams);
  for (const auto& a : targets.samples) {
    const auto g = gait::eval_theta_grad_p(p0, a.s, a.t);
    const Eigen::Map<const Eigen::VectorXd> v(g.data(), gait::kNumParams);
    gram.noalias() += v * v.transpose();
  }
  gram /= static_cast<double>(targets.samples.size());
  const double floor = 1e-14 * std::max(gram.trace(), 1e-300);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

/// Gradient descent with a fixed step and backtracking halving on
/// non-decrease, run in coordinates whitened by the Gauss-Newton metric
/// (computed at `init`, refreshed every `rewhiten_every` iterations).
/// Returns the best iterate seen; never worse than `init`.
inline FitResult fit_params(const AngleTargets& targets, const gait::ParamVector& init, const DescentConfig& cfg = {}) {
  if (targets.samples.empty()) throw DomainError("fit_params: no targets");
  Eigen::MatrixXd M = detail::whitening(targets, init);
  Eigen::VectorXd anchor = Eigen::Map<const Eigen::VectorXd>(init.flat().data(), gait::kNumParams);

  auto to_params = [&](const Eigen::VectorXd& q) -> std::optional<gait::ParamVector> {
    const Eigen::VectorXd p = anchor + M * q;
    if (!(p[gait::kNumParams - 1] > 0.0) || !p.allFinite()) return std::nullopt;
    return gait::ParamVector::from_flat(std::span<const double>(p.data(), gait::kNumParams));
  };

  Eigen::VectorXd q = Eigen::VectorXd::Zero(gait::kNumParams);
  Eigen::VectorXd grad_p(gait::kNumParams);
  FitResult res{init, 0.0, 0.0, 0, {}};
  double loss = detail::loss_and_grad(targets, init, grad_p);
  res.loss = res.initial_loss = loss;
  res.loss_trace.push_back(loss);
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    if (loss < cfg.loss_tolerance) break;
    if (cfg.rewhiten_every > 0 && it > 0 && it % cfg.rewhiten_every == 0) {
      M = detail::whitening(targets, res.params);
      anchor = Eigen::Map<const Eigen::VectorXd>(res.params.flat().data(), gait::kNumParams);
      q.setZero();
    }
    const Eigen::VectorXd grad_q = M * grad_p;
    if (grad_q.norm() < cfg.grad_tolerance) break;
    double step = cfg.step;
    bool accepted = false;
    for (std::size_t h = 0; h <= cfg.max_halvings; ++h, step *= 0.5) {
      const Eigen::VectorXd trial = q - step * grad_q;
      const auto p = to_params(trial);
      if (!p) continue;
      Eigen::VectorXd g(gait::kNumParams);
      const double l = detail::loss_and_grad(targets, *p, g);
      if (l < loss) {
        q = trial;
        loss = l;
        grad_p = g;
        res.params = *p;
        res.loss = l;
        accepted = true;
        break;
      }
    }
    res.iterations = it + 1;
    if (!accepted) break;  // no descent possible at rounding level
    res.loss_trace.push_back(loss);
  }
  return res;
}

}  // namespace swimopt::refit
