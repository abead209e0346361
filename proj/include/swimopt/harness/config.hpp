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

// Run configuration: strict JSON parsing (unknown keys are errors) and the
// inverse serialization embedded in run records.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "swimopt/errors.hpp"
#include "swimopt/gait.hpp"
#include "swimopt/kinematics.hpp"
#include "swimopt/optimize.hpp"
#include "swimopt/surrogate/train.hpp"

namespace swimopt::harness {

using nlohmann::json;

struct GeometryConfig {
  std::size_t segments = 20;
  double max_width = 0.05;
  double mass = 1.0;

  kin::BodyGeometry build() const { return kin::BodyGeometry(segments, kin::half_ellipse(max_width), mass); }
};

struct HydroConfig {
  std::string model = "oracle";  // oracle | surrogate
  double c_tangent = 1.0;
  double c_normal = 2.0;
  std::string weights;  // surrogate weights file
};

struct SimulateConfig {
  std::size_t periods = 3;
  double heading = 0.0;
  double amplitude_scale = 1.0;
  bool dump_surfaces = false;
};

/// Either `gaits` (explicit list), `manifest` (a dataset.json written by
/// sweep-train) or random draws around the base gait.
struct SweepConfig {
  std::size_t n_gaits = 50;
  std::size_t periods = 3;
  std::array<double, 2> amplitude_scale{0.3, 1.5};
  double p1_jitter = 0.015;
  double p2_jitter = 0.03;
  double p8_jitter = 1.0;
  std::array<double, 2> omega_scale{0.9, 1.1};
  std::vector<std::vector<double>> gaits;
  std::string manifest;
};

struct DepthSweepConfig {
  std::vector<std::size_t> depths{1, 2, 3, 4, 5, 6, 7};
  std::optional<std::size_t> epochs;  // defaults to train.epochs
};

struct OptimizeConfig {
  std::string method = "bgps";  // bgps | hillclimb
  double amplitude_scale = 1.0;
  std::size_t episode_periods = 2;
  opt::SearchConfig search;
  std::size_t refit_iterations = 5000;
};

struct RunConfig {
  std::string gait_file;  // empty selects the bundled default gait
  std::uint64_t seed = 1;
  GeometryConfig geometry;
  HydroConfig hydro;
  SimulateConfig simulate;
  SweepConfig sweep;
  surrogate::TrainConfig train;
  DepthSweepConfig depth_sweep;
  OptimizeConfig optimize;
  std::filesystem::path base_dir;  // directory relative paths are resolved against; not serialized

  std::filesystem::path resolve(const std::string& p) const {
    const std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  }
};

namespace detail {

/// Reads keys from one JSON object and rejects the ones nobody asked for.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where(key) + ": wrong type");
    }
  }

  template <typename T>
  void get(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    T v{};
    get(key, v);
    out = v;
  }

  void positive(const char* key, double& out) {
    get(key, out);
    if (!(out > 0.0)) throw ConfigError(where(key) + ": must be > 0");
  }

  void positive(const char* key, std::size_t& out) {
    get(key, out);
    if (out == 0) throw ConfigError(where(key) + ": must be > 0");
  }

  std::optional<Reader> child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return std::nullopt;
    return Reader(*it, where(key));
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(where(it.key().c_str()) + ": unknown key");
    }
  }

  std::string where(const char* key = nullptr) const {
    std::string w = path_.empty() ? "config" : path_;
    if (key) w += "." + std::string(key);
    return w;
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void read_range(Reader& r, const char* key, std::array<double, 2>& out) {
  r.get(key, out);
  if (!(out[0] <= out[1])) throw ConfigError(r.where(key) + ": expected [lo, hi] with lo <= hi");
}

}  // namespace detail

inline RunConfig parse_config(const json& j, std::filesystem::path base_dir = {}) {
  RunConfig c;
  c.base_dir = std::move(base_dir);
  detail::Reader r(j, "");
  r.get("gait_file", c.gait_file);
  r.get("seed", c.seed);
  if (auto g = r.child("geometry")) {
    g->get("segments", c.geometry.segments);
    if (c.geometry.segments < 2) throw ConfigError("config.geometry.segments: must be >= 2");
    g->positive("max_width", c.geometry.max_width);
    g->positive("mass", c.geometry.mass);
    g->finish();
  }
  if (auto h = r.child("hydro")) {
    h->get("model", c.hydro.model);
    if (c.hydro.model != "oracle" && c.hydro.model != "surrogate") {
      throw ConfigError("config.hydro.model: expected \"oracle\" or \"surrogate\"");
    }
    h->positive("c_tangent", c.hydro.c_tangent);
    h->positive("c_normal", c.hydro.c_normal);
    h->get("weights", c.hydro.weights);
    h->finish();
  }
  if (auto s = r.child("simulate")) {
    s->positive("periods", c.simulate.periods);
    s->get("heading", c.simulate.heading);
    s->positive("amplitude_scale", c.simulate.amplitude_scale);
    s->get("dump_surfaces", c.simulate.dump_surfaces);
    s->finish();
  }
  if (auto s = r.child("sweep")) {
    s->positive("n_gaits", c.sweep.n_gaits);
    s->positive("periods", c.sweep.periods);
    detail::read_range(*s, "amplitude_scale", c.sweep.amplitude_scale);
    s->get("p1_jitter", c.sweep.p1_jitter);
    s->get("p2_jitter", c.sweep.p2_jitter);
    s->get("p8_jitter", c.sweep.p8_jitter);
    detail::read_range(*s, "omega_scale", c.sweep.omega_scale);
    s->get("gaits", c.sweep.gaits);
    for (std::size_t i = 0; i < c.sweep.gaits.size(); ++i) {
      if (c.sweep.gaits[i].size() != gait::kNumParams) {
        throw ConfigError("config.sweep.gaits[" + std::to_string(i) + "]: expected 12 numbers");
      }
    }
    s->get("manifest", c.sweep.manifest);
    s->finish();
  }
  if (auto t = r.child("train")) {
    t->get("learning_rate", c.train.learning_rate);
    t->get("momentum", c.train.momentum);
    t->positive("batch_size", c.train.batch_size);
    t->get("epochs", c.train.epochs);
    t->positive("depth", c.train.depth);
    t->positive("width", c.train.width);
    t->get("mse_weight", c.train.weights.mse);
    t->get("cos_weight", c.train.weights.cos);
    t->finish();
    if (!(c.train.learning_rate >= 0.0)) throw ConfigError("config.train.learning_rate: must be >= 0");
    if (!(c.train.momentum >= 0.0 && c.train.momentum < 1.0)) {
      throw ConfigError("config.train.momentum: must be in [0, 1)");
    }
  }
  if (auto d = r.child("depth_sweep")) {
    d->get("depths", c.depth_sweep.depths);
    for (std::size_t depth : c.depth_sweep.depths) {
      if (depth == 0) throw ConfigError("config.depth_sweep.depths: depths must be >= 1");
    }
    d->get("epochs", c.depth_sweep.epochs);
    d->finish();
  }
  if (auto o = r.child("optimize")) {
    auto& s = c.optimize.search;
    o->get("method", c.optimize.method);
    if (c.optimize.method != "bgps" && c.optimize.method != "hillclimb") {
      throw ConfigError("config.optimize.method: expected \"bgps\" or \"hillclimb\"");
    }
    o->positive("amplitude_scale", c.optimize.amplitude_scale);
    o->positive("episode_periods", c.optimize.episode_periods);
    o->get("epsilon", s.epsilon);
    if (!(s.epsilon >= 0.0)) throw ConfigError("config.optimize.epsilon: must be >= 0");
    o->get("population", s.population);
    o->positive("perturbation_scale", s.perturbation_scale);
    o->positive("step_size", s.step_size);
    o->get("search_iterations", s.search_iterations);
    o->get("outer_iterations", s.outer_iterations);
    o->positive("hill_delta", s.hill_delta);
    o->get("hill_iterations", s.hill_iterations);
    o->get("margin", s.margin);
    if (!(s.margin >= 0.0)) throw ConfigError("config.optimize.margin: must be >= 0");
    o->get("refit_iterations", c.optimize.refit_iterations);
    o->finish();
  }
  r.finish();
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

inline json to_json(const RunConfig& c) {
  const auto& s = c.optimize.search;
  json depth_sweep = {{"depths", c.depth_sweep.depths}};
  if (c.depth_sweep.epochs) depth_sweep["epochs"] = *c.depth_sweep.epochs;
  return json{
      {"gait_file", c.gait_file},
      {"seed", c.seed},
      {"geometry", {{"segments", c.geometry.segments}, {"max_width", c.geometry.max_width}, {"mass", c.geometry.mass}}},
      {"hydro",
       {{"model", c.hydro.model},
        {"c_tangent", c.hydro.c_tangent},
        {"c_normal", c.hydro.c_normal},
        {"weights", c.hydro.weights}}},
      {"simulate",
       {{"periods", c.simulate.periods},
        {"heading", c.simulate.heading},
        {"amplitude_scale", c.simulate.amplitude_scale},
        {"dump_surfaces", c.simulate.dump_surfaces}}},
      {"sweep",
       {{"n_gaits", c.sweep.n_gaits},
        {"periods", c.sweep.periods},
        {"amplitude_scale", c.sweep.amplitude_scale},
        {"p1_jitter", c.sweep.p1_jitter},
        {"p2_jitter", c.sweep.p2_jitter},
        {"p8_jitter", c.sweep.p8_jitter},
        {"omega_scale", c.sweep.omega_scale},
        {"gaits", c.sweep.gaits},
        {"manifest", c.sweep.manifest}}},
      {"train",
       {{"learning_rate", c.train.learning_rate},
        {"momentum", c.train.momentum},
        {"batch_size", c.train.batch_size},
        {"epochs", c.train.epochs},
        {"depth", c.train.depth},
        {"width", c.train.width},
        {"mse_weight", c.train.weights.mse},
        {"cos_weight", c.train.weights.cos}}},
      {"depth_sweep", depth_sweep},
      {"optimize",
       {{"method", c.optimize.method},
        {"amplitude_scale", c.optimize.amplitude_scale},
        {"episode_periods", c.optimize.episode_periods},
        {"epsilon", s.epsilon},
        {"population", s.population},
        {"perturbation_scale", s.perturbation_scale},
        {"step_size", s.step_size},
        {"search_iterations", s.search_iterations},
        {"outer_iterations", s.outer_iterations},
        {"hill_delta", s.hill_delta},
        {"hill_iterations", s.hill_iterations},
        {"margin", s.margin},
        {"refit_iterations", c.optimize.refit_iterations}}},
  };
}

}  // namespace swimopt::harness
