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

// Outer optimizers over gait parameters: coordinate hill climbing and the
// baseline-guided loop (augmentation search, refit, accept if better).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "swimopt/errors.hpp"
#include "swimopt/gait.hpp"
#include "swimopt/hydro.hpp"
#include "swimopt/kinematics.hpp"
#include "swimopt/policy.hpp"
#include "swimopt/refit.hpp"
#include "swimopt/seeds.hpp"
#include "swimopt/simulate.hpp"

namespace swimopt::opt {

inline constexpr double kMinDirectionNorm = 1e-9;

struct Environment {
  const hydro::ForceModel* model = nullptr;
  kin::BodyGeometry geometry;
  std::size_t episode_periods = 2;

  std::size_t n_steps() const { return episode_periods * sim::kStepsPerPeriod; }

  sim::EpisodeSpec spec(const gait::ParamVector& p, const AugmentationPolicy* policy = nullptr) const {
    sim::EpisodeSpec s;
    s.gait = p;
    s.policy = policy;
    s.n_steps = n_steps();
    return s;
  }

  sim::Trajectory rollout(const gait::ParamVector& p, const AugmentationPolicy* policy = nullptr) const {
    if (!model) throw ConfigError("environment has no force model");
    return sim::step_episode(spec(p, policy), *model, geometry);
  }
};

struct SearchConfig {
  double epsilon = 0.05;
  std::size_t population = 4;  // perturbation pairs per search iteration
  double perturbation_scale = 0.3;
  double step_size = 0.3;
  std::size_t search_iterations = 5;
  std::size_t outer_iterations = 20;
  double hill_delta = 0.1;
  std::size_t hill_iterations = 34;  // 1 + 24 * 34 episodes, about the bgps budget at defaults
  double margin = 1e-4;
  std::uint64_t seed = 1;
};

struct EpisodeRewards {
  std::vector<double> rewards;
  double total = 0.0;
};

/// Unit vector along the net displacement of a trajectory.
inline Vec2 baseline_direction(const sim::Trajectory& traj) {
  const Vec2 d = traj.displacement();
  const double n = norm(d);
  if (!(n >= kMinDirectionNorm)) throw DegenerateDirectionError("baseline displacement below 1e-9");
  return d * (1.0 / n);
}

/// reward_k = (com_k - com_{k-1}) . direction
inline EpisodeRewards episode_reward(const sim::Trajectory& traj, Vec2 direction) {
  if (!(std::abs(norm(direction) - 1.0) <= 1e-9)) throw DomainError("episode_reward: direction must be a unit vector");
  EpisodeRewards out;
  if (traj.states.size() < 2) return out;
  out.rewards.reserve(traj.states.size() - 1);
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const double r = dot(traj.states[k].com_position - traj.states[k - 1].com_position, direction);
    out.rewards.push_back(r);
    out.total += r;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hill climbing

using Objective = std::function<double(const gait::ParamVector&)>;

struct HillClimbStep {
  std::size_t iteration = 0;
  bool moved = false;
  double delta = 0.0;
  double value = 0.0;
  gait::ParamVector params = gait::default_gait();
};

struct HillClimbResult {
  gait::ParamVector params = gait::default_gait();
  double value = 0.0;
  std::vector<HillClimbStep> trace;  // trace[0] is the start point
  std::size_t evaluations = 0;
};

struct HillClimbConfig {
  double delta = 0.1;
  std::size_t max_iterations = 40;
  double min_delta = 1e-5;
};

/// Scores a batch of candidates at once; one value per candidate.
using BatchObjective = std::function<std::vector<double>(const std::vector<gait::ParamVector>&)>;

/// Each iteration tries p +- delta_i e_i in all 12 coordinates, with
/// delta_i = delta * max(|p_i|, 0.1), and moves to the best strict
/// improvement; otherwise delta is halved. The neighbours of one iteration
/// are scored in a single batch call, in coordinate order (+ before -).
inline HillClimbResult hill_climb(const gait::ParamVector& p0, const BatchObjective& objective,
                                  const HillClimbConfig& cfg = {}) {
  double delta = cfg.delta;
  HillClimbResult res;
  res.params = p0;
  res.value = objective({p0}).at(0);
  res.evaluations = 1;
  if (!std::isfinite(res.value)) throw DomainError("hill_climb: objective not finite at p0");
  res.trace.push_back({0, false, delta, res.value, p0});
  std::vector<gait::ParamVector> cands;
  for (std::size_t it = 1; it <= cfg.max_iterations && delta >= cfg.min_delta; ++it) {
    const auto base = res.params.flat();
    cands.clear();
    for (std::size_t i = 0; i < gait::kNumParams; ++i) {
      const double di = delta * std::max(std::abs(base[i]), 0.1);
      for (double sign : {1.0, -1.0}) {
        auto q = base;
        q[i] += sign * di;
        if (i == gait::kNumParams - 1 && !(q[i] > 0.0)) continue;  // omega must stay positive
        cands.push_back(gait::ParamVector::from_flat(q));
      }
    }
    const auto values = objective(cands);
    if (values.size() != cands.size()) throw std::logic_error("hill_climb: objective returned wrong count");
    res.evaluations += cands.size();
    std::optional<std::size_t> best;
    double best_value = res.value;
    for (std::size_t k = 0; k < cands.size(); ++k) {
      if (std::isfinite(values[k]) && values[k] > best_value) {
        best_value = values[k];
        best = k;
      }
    }
    const bool moved = best.has_value();
    if (moved) {
      res.params = cands[*best];
      res.value = best_value;
    }
    res.trace.push_back({it, moved, delta, res.value, res.params});
    if (!moved) delta *= 0.5;
  }
  return res;
}

inline HillClimbResult hill_climb(const gait::ParamVector& p0, const Objective& objective,
                                  const HillClimbConfig& cfg = {}) {
  const BatchObjective batch = [&](const std::vector<gait::ParamVector>& ps) {
    std::vector<double> v;
    v.reserve(ps.size());
    for (const auto& p : ps) v.push_back(objective(p));
    return v;
  };
  return hill_climb(p0, batch, cfg);
}

// ---------------------------------------------------------------------------
// Augmentation search

struct SearchResult {
  AugmentationPolicy policy;
  double best_return = 0.0;
  double baseline_return = 0.0;
  sim::Trajectory best_trajectory;  // rollout of `policy` (the baseline rollout for the zero policy)
  std::size_t episodes = 0;
};

/// Symmetric-perturbation random search over the affine policy weights,
/// starting from the zero policy. Returns the best policy seen.
inline SearchResult search_augmentation(const gait::ParamVector& baseline, const Environment& env,
                                        const SearchConfig& cfg, const sim::Trajectory& baseline_traj,
                                        Vec2 direction) {
  if (!env.model) throw ConfigError("environment has no force model");
  const std::size_t n_joints = env.geometry.n_joints();
  AugmentationPolicy center(n_joints, cfg.epsilon);
  SearchResult res{center, 0.0, 0.0, baseline_traj, 0};
  res.baseline_return = episode_reward(baseline_traj, direction).total;
  res.best_return = res.baseline_return;

  const std::size_t dim = AugmentationPolicy::param_count(n_joints);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t pop = cfg.population;

  std::vector<std::vector<double>> noise(pop, std::vector<double>(dim));
  std::vector<AugmentationPolicy> candidates(2 * pop, center);
  std::vector<sim::EpisodeSpec> specs(2 * pop);
  for (std::size_t it = 0; it < cfg.search_iterations && pop > 0; ++it) {
    for (std::size_t k = 0; k < pop; ++k) {
      for (double& v : noise[k]) v = normal(rng);
      for (std::size_t s = 0; s < 2; ++s) {
        const double sign = s == 0 ? 1.0 : -1.0;
        auto& cand = candidates[2 * k + s];
        cand = center;
        auto w = cand.params();
        for (std::size_t i = 0; i < dim; ++i) w[i] += sign * cfg.perturbation_scale * noise[k][i];
        specs[2 * k + s] = env.spec(baseline, &cand);
      }
    }
    auto results = sim::run_episodes(specs, *env.model, env.geometry);
    res.episodes += results.size();
    std::vector<double> returns(results.size());
    for (std::size_t e = 0; e < results.size(); ++e) {
      if (results[e].error) std::rethrow_exception(results[e].error);
      returns[e] = episode_reward(results[e].trajectory, direction).total;
      if (returns[e] > res.best_return) {
        res.best_return = returns[e];
        res.policy = candidates[e];
        res.best_trajectory = std::move(results[e].trajectory);
      }
    }
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(returns.size());
    double var = 0.0;
    for (double r : returns) var += (r - mean) * (r - mean);
    const double sd = std::sqrt(var / static_cast<double>(returns.size()));
    if (!(sd > 0.0)) continue;
    auto w = center.params();
    const double scale = cfg.step_size / (static_cast<double>(pop) * sd);
    for (std::size_t k = 0; k < pop; ++k) {
      const double diff = returns[2 * k] - returns[2 * k + 1];
      for (std::size_t i = 0; i < dim; ++i) w[i] += scale * diff * noise[k][i];
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Baseline-guided loop

struct TraceRow {
  std::size_t iteration = 0;
  std::string phase;  // init, search, refit, accept, reject, error
  double displacement = std::numeric_limits<double>::quiet_NaN();
  double ret = std::numeric_limits<double>::quiet_NaN();
  double refit_loss = std::numeric_limits<double>::quiet_NaN();
  gait::ParamVector params = gait::default_gait();
};

struct HistoryEntry {
  gait::ParamVector params = gait::default_gait();
  double displacement = 0.0;
  bool accepted = false;
  std::optional<AugmentationPolicy> policy;  // augmentation that led to an accepted update
};

struct BgpsResult {
  std::vector<HistoryEntry> history;  // history[0] is p0; one entry per outer iteration after that
  std::vector<TraceRow> trace;
  std::vector<std::string> errors;
  std::size_t accepted = 0;
  std::size_t episodes = 0;
};

inline BgpsResult bgps_loop(const gait::ParamVector& p0, const Environment& env, const SearchConfig& cfg,
                            const refit::DescentConfig& fit_cfg = {}) {
  BgpsResult out;
  gait::ParamVector baseline = p0;
  sim::Trajectory base_traj = env.rollout(baseline);
  ++out.episodes;
  Vec2 direction = baseline_direction(base_traj);
  double base_disp = norm(base_traj.displacement());
  out.history.push_back({baseline, base_disp, false, std::nullopt});
  out.trace.push_back({0, "init", base_disp, base_disp, std::numeric_limits<double>::quiet_NaN(), baseline});

  for (std::size_t it = 1; it <= cfg.outer_iterations; ++it) {
    HistoryEntry entry{baseline, base_disp, false, std::nullopt};
    try {
      SearchConfig sc = cfg;
      sc.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(it));
      SearchResult sr = search_augmentation(baseline, env, sc, base_traj, direction);
      out.episodes += sr.episodes;
      out.trace.push_back({it, "search", norm(sr.best_trajectory.displacement()), sr.best_return,
                           std::numeric_limits<double>::quiet_NaN(), baseline});
      if (sr.best_return > sr.baseline_return + cfg.margin) {
        const auto targets = refit::collect_targets(sr.best_trajectory, env.geometry, baseline);
        const auto fit = refit::fit_params(targets, baseline, fit_cfg);
        sim::Trajectory fit_traj = env.rollout(fit.params);
        ++out.episodes;
        const double fit_return = episode_reward(fit_traj, direction).total;
        out.trace.push_back({it, "refit", norm(fit_traj.displacement()), fit_return, fit.loss, fit.params});
        if (fit_return > base_disp + cfg.margin) {
          baseline = fit.params;
          base_traj = std::move(fit_traj);
          direction = baseline_direction(base_traj);
          base_disp = norm(base_traj.displacement());
          entry = {baseline, base_disp, true, sr.policy};
          ++out.accepted;
          out.trace.push_back({it, "accept", base_disp, base_disp, fit.loss, baseline});
        } else {
          out.trace.push_back({it, "reject", base_disp, base_disp, fit.loss, baseline});
        }
      } else {
        out.trace.push_back({it, "reject", base_disp, base_disp, std::numeric_limits<double>::quiet_NaN(), baseline});
      }
    } catch (const std::exception& ex) {
      out.errors.push_back("iteration " + std::to_string(it) + ": " + ex.what());
      out.trace.push_back({it, "error", base_disp, base_disp, std::numeric_limits<double>::quiet_NaN(), baseline});
    }
    out.history.push_back(std::move(entry));
  }
  return out;
}

/// Hill climbing on clean-episode displacement, reported in the same trace
/// schema. The neighbours of each iteration run as one lockstep batch; an
/// episode that fails scores -inf.
inline BgpsResult hill_climb_loop(const gait::ParamVector& p0, const Environment& env, const SearchConfig& cfg) {
  if (!env.model) throw ConfigError("environment has no force model");
  BgpsResult out;
  const BatchObjective obj = [&](const std::vector<gait::ParamVector>& ps) {
    std::vector<sim::EpisodeSpec> specs;
    specs.reserve(ps.size());
    for (const auto& p : ps) specs.push_back(env.spec(p));
    const auto results = sim::run_episodes(specs, *env.model, env.geometry);
    out.episodes += results.size();
    std::vector<double> v(results.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < results.size(); ++k) {
      if (!results[k].error) v[k] = norm(results[k].trajectory.displacement());
    }
    return v;
  };
  const auto hc = hill_climb(p0, obj, HillClimbConfig{cfg.hill_delta, cfg.hill_iterations});
  for (const auto& s : hc.trace) {
    const std::string phase = s.iteration == 0 ? "init" : (s.moved ? "accept" : "reject");
    out.trace.push_back({s.iteration, phase, s.value, s.value, std::numeric_limits<double>::quiet_NaN(), s.params});
    out.history.push_back({s.params, s.value, s.moved, std::nullopt});
    if (s.moved) ++out.accepted;
  }
  return out;
}

}  // namespace swimopt::opt
