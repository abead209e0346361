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

// The four CLI commands. Each returns a short JSON summary and writes its
// artifacts (plus run.json) into the output directory, or nothing on error.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "swimopt/errors.hpp"
#include "swimopt/force_models.hpp"
#include "swimopt/gait.hpp"
#include "swimopt/harness/config.hpp"
#include "swimopt/harness/io.hpp"
#include "swimopt/optimize.hpp"
#include "swimopt/seeds.hpp"
#include "swimopt/simulate.hpp"
#include "swimopt/surrogate/dataset.hpp"
#include "swimopt/surrogate/model.hpp"
#include "swimopt/surrogate/train.hpp"

namespace swimopt::harness {

inline constexpr const char* kVersion = "swimopt 1.0.0";

inline gait::ParamVector base_gait(const RunConfig& c) {
  return c.gait_file.empty() ? gait::default_gait() : load_gait(c.resolve(c.gait_file));
}

inline std::unique_ptr<hydro::ForceModel> build_force_model(const RunConfig& c) {
  ForceModelConfig m;
  try {
    m.drag = hydro::DragCoefficients(c.hydro.c_tangent, c.hydro.c_normal);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config.hydro: ") + e.what());
  }
  if (c.hydro.model == "surrogate") {
    if (c.hydro.weights.empty()) throw ConfigError("config.hydro.weights: required for the surrogate model");
    m.kind = ForceModelKind::surrogate;
    m.network = std::make_shared<surrogate::SurrogateNetwork>(
        surrogate::load_weights(c.resolve(c.hydro.weights).string()));
  }
  return make_force_model(m);
}

inline json run_record(const std::string& command, const RunConfig& c) {
  return json{{"command", command},
              {"version", kVersion},
              {"seed", c.seed},
              {"substreams",
               {{"policy-search", derive_seed(c.seed, "policy-search")},
                {"training", derive_seed(c.seed, "training")},
                {"splits", derive_seed(c.seed, "splits")},
                {"sweep", derive_seed(c.seed, "sweep")}}},
              {"config", to_json(c)}};
}

// ---------------------------------------------------------------------------
// simulate

inline std::string trajectory_csv(const sim::Trajectory& traj) {
  const std::size_t n_joints = traj.states.front().joint_angles.size();
  std::vector<std::string> header{"time", "com_x", "com_y", "heading", "vel_x", "vel_y", "angular_velocity"};
  for (std::size_t j = 1; j <= n_joints; ++j) header.push_back("theta_" + std::to_string(j));
  CsvWriter csv(header);
  for (const auto& s : traj.states) {
    std::vector<std::string> row{fmt(s.time),          fmt(s.com_position.x), fmt(s.com_position.y), fmt(s.heading),
                                 fmt(s.com_velocity.x), fmt(s.com_velocity.y), fmt(s.angular_velocity)};
    for (double a : s.joint_angles) row.push_back(fmt(a));
    csv.row(row);
  }
  return csv.str();
}

/// World-frame outline points and forces, one block of 400 rows per step.
inline std::string surfaces_csv(const sim::Trajectory& traj) {
  CsvWriter csv({"step", "x", "y", "fx", "fy"});
  for (std::size_t k = 0; k < traj.outlines.size(); ++k) {
    for (std::size_t i = 0; i < kin::kOutlinePoints; ++i) {
      const Vec2 p = kin::to_world(traj.states[k], traj.outlines[k].points[i]);
      const Vec2 f = traj.forces[k].forces[i];
      csv.row({std::to_string(k), fmt(p.x), fmt(p.y), fmt(f.x), fmt(f.y)});
    }
  }
  return csv.str();
}

inline json cmd_simulate(const RunConfig& c, const fs::path& out_dir) {
  const auto geometry = c.geometry.build();
  const auto model = build_force_model(c);
  sim::EpisodeSpec spec;
  spec.gait = base_gait(c).scaled_amplitude(c.simulate.amplitude_scale);
  spec.n_steps = c.simulate.periods * sim::kStepsPerPeriod;
  spec.initial_heading = c.simulate.heading;
  spec.record_surfaces = c.simulate.dump_surfaces;
  const auto traj = sim::step_episode(spec, *model, geometry);

  const Vec2 d = traj.displacement();
  const double duration = traj.states.back().time;
  json summary{{"displacement", {d.x, d.y}},
               {"displacement_norm", norm(d)},
               {"mean_speed", norm(d) / duration},
               {"duration", duration},
               {"steps", spec.n_steps},
               {"gait", gait_to_json(spec.gait)["params"]}};
  ArtifactSet art(out_dir);
  art.add("trajectory.csv", trajectory_csv(traj));
  if (c.simulate.dump_surfaces) art.add("surfaces.csv", surfaces_csv(traj));
  art.add_json("summary.json", summary);
  art.commit(run_record("simulate", c));
  return summary;
}

// ---------------------------------------------------------------------------
// sweep-train / depth-sweep

struct DatasetSpec {
  std::vector<gait::ParamVector> gaits;
  std::size_t n_steps = 0;
  std::uint64_t split_seed = 0;
};

inline gait::ParamVector sweep_gait(const std::vector<double>& v, std::size_t index) {
  try {
    return gait::ParamVector::from_flat(v);
  } catch (const DomainError& e) {
    throw ConfigError("sweep gait " + std::to_string(index) + ": " + e.what());
  }
}

inline DatasetSpec dataset_spec(const RunConfig& c) {
  DatasetSpec spec;
  const auto& s = c.sweep;
  if (!s.manifest.empty()) {
    const auto path = c.resolve(s.manifest);
    json m;
    try {
      m = json::parse(read_file(path));
      for (const auto& g : m.at("gaits")) spec.gaits.push_back(sweep_gait(g.get<std::vector<double>>(), spec.gaits.size()));
      spec.n_steps = m.at("steps").get<std::size_t>();
      spec.split_seed = m.at("split_seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    return spec;
  }
  spec.n_steps = s.periods * sim::kStepsPerPeriod;
  spec.split_seed = derive_seed(c.seed, "splits");
  if (!s.gaits.empty()) {
    for (std::size_t i = 0; i < s.gaits.size(); ++i) spec.gaits.push_back(sweep_gait(s.gaits[i], i));
    return spec;
  }
  const auto base = base_gait(c).flat();
  std::mt19937_64 rng(derive_seed(c.seed, "sweep"));
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  for (std::size_t i = 0; i < s.n_gaits; ++i) {
    auto p = base;
    const double amp = uniform(s.amplitude_scale[0], s.amplitude_scale[1]);
    for (std::size_t k = 0; k < gait::kNumAmplitude; ++k) p[k] *= amp;
    p[0] += uniform(-s.p1_jitter, s.p1_jitter);
    p[1] += uniform(-s.p2_jitter, s.p2_jitter);
    p[6] = uniform(-M_PI, M_PI);
    p[7] += uniform(-s.p8_jitter, s.p8_jitter);
    p[11] *= uniform(s.omega_scale[0], s.omega_scale[1]);
    spec.gaits.push_back(sweep_gait(std::vector<double>(p.begin(), p.end()), i));
  }
  return spec;
}

inline json manifest_json(const DatasetSpec& spec, const surrogate::ForceDataset& data) {
  json gaits = json::array();
  for (const auto& g : spec.gaits) gaits.push_back(gait_to_json(g)["params"]);
  return json{{"gaits", gaits},
              {"steps", spec.n_steps},
              {"split_seed", spec.split_seed},
              {"test_gaits", data.test_gaits},
              {"train_samples", data.train.size()},
              {"test_samples", data.test.size()}};
}

inline surrogate::ForceDataset build_dataset(const RunConfig& c, const DatasetSpec& spec) {
  const hydro::ResistiveForceModel oracle(hydro::DragCoefficients(c.hydro.c_tangent, c.hydro.c_normal));
  return surrogate::generate_dataset(spec.gaits, c.geometry.build(), oracle, spec.n_steps, spec.split_seed);
}

inline std::string loss_curve_csv(const std::vector<surrogate::EpochStats>& hist) {
  CsvWriter csv({"epoch", "train_loss", "test_loss", "mse_part", "cos_part"});
  for (const auto& e : hist) {
    csv.row({std::to_string(e.epoch), fmt(e.train_loss), fmt(e.test_loss), fmt(e.mse_part), fmt(e.cos_part)});
  }
  return csv.str();
}

inline json cmd_sweep_and_train(const RunConfig& c, const fs::path& out_dir) {
  const auto spec = dataset_spec(c);
  const auto data = build_dataset(c, spec);
  auto cfg = c.train;
  cfg.seed = derive_seed(c.seed, "training");
  auto net = surrogate::make_network(data, cfg);
  const auto hist = surrogate::train(net, data, cfg);
  const auto final_test = surrogate::evaluate(net, data, data.test, cfg.weights);
  const auto baseline = surrogate::mean_predictor_loss(data, cfg.weights);

  std::ostringstream weights;
  surrogate::write_weights(net, weights);
  json summary{{"gaits", spec.gaits.size()},
               {"train_samples", data.train.size()},
               {"test_samples", data.test.size()},
               {"epochs", hist.size()},
               {"final_train_loss", hist.empty() ? std::numeric_limits<double>::quiet_NaN() : hist.back().train_loss},
               {"final_test_loss", final_test.total},
               {"final_test_mse", final_test.mse},
               {"final_test_cos", final_test.cos},
               {"mean_predictor_loss", baseline.total},
               {"loss_ratio", final_test.total / baseline.total}};
  ArtifactSet art(out_dir);
  art.add_json("dataset.json", manifest_json(spec, data));
  art.add("weights.bin", weights.str());
  art.add("loss_curve.csv", loss_curve_csv(hist));
  art.add_json("summary.json", summary);
  art.commit(run_record("sweep-train", c));
  return summary;
}

inline json cmd_depth_sweep(const RunConfig& c, const fs::path& out_dir) {
  const auto spec = dataset_spec(c);
  const auto data = build_dataset(c, spec);
  CsvWriter csv({"depth", "train_loss", "test_loss"});
  json notes = json::array();
  for (std::size_t depth : c.depth_sweep.depths) {
    auto cfg = c.train;
    cfg.seed = derive_seed(c.seed, "training");
    cfg.depth = depth;
    if (c.depth_sweep.epochs) cfg.epochs = *c.depth_sweep.epochs;
    double train_loss = std::numeric_limits<double>::quiet_NaN();
    double test_loss = train_loss;
    try {
      auto net = surrogate::make_network(data, cfg);
      surrogate::train(net, data, cfg);
      train_loss = surrogate::evaluate(net, data, data.train, cfg.weights).total;
      test_loss = surrogate::evaluate(net, data, data.test, cfg.weights).total;
    } catch (const std::exception& e) {
      const std::string note = "depth " + std::to_string(depth) + ": " + e.what();
      std::cerr << note << "\n";
      notes.push_back(note);
    }
    csv.row({std::to_string(depth), fmt(train_loss), fmt(test_loss)});
  }
  json summary{{"depths", c.depth_sweep.depths}, {"notes", notes}};
  ArtifactSet art(out_dir);
  art.add("depth_sweep.csv", csv.str());
  art.add_json("summary.json", summary);
  art.commit(run_record("depth-sweep", c));
  return summary;
}

// ---------------------------------------------------------------------------
// optimize

inline std::string trace_csv(const std::vector<opt::TraceRow>& rows) {
  std::vector<std::string> header{"iteration", "phase", "displacement", "return", "refit_loss"};
  for (std::size_t i = 1; i <= gait::kNumParams; ++i) header.push_back("p_" + std::to_string(i));
  CsvWriter csv(header);
  for (const auto& r : rows) {
    std::vector<std::string> row{std::to_string(r.iteration), r.phase, fmt(r.displacement), fmt(r.ret),
                                 fmt(r.refit_loss)};
    for (double v : r.params.flat()) row.push_back(fmt(v));
    csv.row(row);
  }
  return csv.str();
}

inline json history_json(const opt::BgpsResult& res) {
  json h = json::array();
  for (std::size_t i = 0; i < res.history.size(); ++i) {
    const auto& e = res.history[i];
    json entry{{"iteration", i},
               {"params", gait_to_json(e.params)["params"]},
               {"displacement", e.displacement},
               {"accepted", e.accepted}};
    if (e.policy) {
      const auto w = e.policy->params();
      entry["policy"] = {{"epsilon", e.policy->epsilon()},
                         {"n_joints", e.policy->n_joints()},
                         {"observation_dim", opt::kObservationDim},
                         {"weights", std::vector<double>(w.begin(), w.end())}};
    }
    h.push_back(std::move(entry));
  }
  return json{{"history", h}, {"errors", res.errors}};
}

inline json cmd_optimize(const RunConfig& c, const fs::path& out_dir) {
  const auto model = build_force_model(c);
  opt::Environment env;
  env.model = model.get();
  env.geometry = c.geometry.build();
  env.episode_periods = c.optimize.episode_periods;
  auto search = c.optimize.search;
  search.seed = derive_seed(c.seed, "policy-search");
  const auto p0 = base_gait(c).scaled_amplitude(c.optimize.amplitude_scale);

  opt::BgpsResult res;
  if (c.optimize.method == "bgps") {
    refit::DescentConfig fit;
    fit.max_iterations = c.optimize.refit_iterations;
    res = opt::bgps_loop(p0, env, search, fit);
  } else {
    res = opt::hill_climb_loop(p0, env, search);
  }
  const auto& last = res.history.back();
  json summary{{"method", c.optimize.method},
               {"initial_displacement", res.history.front().displacement},
               {"final_displacement", last.displacement},
               {"accepted", res.accepted},
               {"episodes", res.episodes},
               {"errors", res.errors.size()}};
  ArtifactSet art(out_dir);
  art.add("trace.csv", trace_csv(res.trace));
  art.add_json("final_gait.json", gait_to_json(last.params));
  art.add_json("history.json", history_json(res));
  art.add_json("summary.json", summary);
  art.commit(run_record("optimize", c));
  return summary;
}

}  // namespace swimopt::harness
