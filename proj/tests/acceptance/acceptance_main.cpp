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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "swimopt/harness/commands.hpp"
#include "swimopt/optimize.hpp"
#include "swimopt/refit.hpp"
#include "swimopt/surrogate/model.hpp"
#include "swimopt/surrogate/network.hpp"
#include "test_oracles.hpp"

namespace {

using namespace swimopt;
namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const fs::path kWork = fs::temp_directory_path() / "swimopt_acceptance";
const hydro::ResistiveForceModel kOracle;

gait::ParamVector detuned() { return gait::default_gait().scaled_amplitude(0.5); }

// ---------------------------------------------------------------------------
// 1. gradients

double theta_grad_error(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto p = testing_oracles::random_params(rng);
  const double s = u(rng), t = 2.0 * u(rng);
  const auto g = gait::eval_theta_grad_p(p, s, t);
  std::array<double, 12> flat{};
  std::copy(p.flat().begin(), p.flat().end(), flat.begin());
  const auto fd = testing_oracles::fd_theta_grad(flat, s, t, 1e-6);
  double worst = 0.0;
  for (std::size_t k = 0; k < 12; ++k) worst = std::max(worst, testing_oracles::rel_err(g[k], fd[k]));
  return worst;
}

double backward_error(std::size_t instance) {
  using namespace swimopt::surrogate;
  std::mt19937_64 rng(1000 + instance);
  std::normal_distribution<double> n(0.0, 1.0);
  const std::size_t depth = 1 + instance % 7;
  SurrogateNetwork net({12, 6, depth, 8}, 77 + instance);
  for (double& w : net.params()) w += 0.1 * n(rng);
  Standardizer out = Standardizer::identity(6);
  for (Eigen::Index i = 0; i < 6; ++i) {
    out.mean[i] = n(rng);
    out.scale[i] = 0.5 + std::abs(n(rng));
  }
  net.set_scalers(Standardizer::identity(12), out);
  Eigen::MatrixXd x(12, 3), t(6, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = n(rng);
  const LossWeights w{1.0, 0.5};
  std::vector<double> grad(net.parameter_count(), 0.0);
  loss_and_gradient(net, x, t, w, grad);
  double worst = 0.0;
  const double h = 1e-5;
  for (std::size_t k = 0; k < net.parameter_count(); ++k) {
    const double saved = net.params()[k];
    net.params()[k] = saved + h;
    const double lp = loss_and_gradient(net, x, t, w).total;
    net.params()[k] = saved - h;
    const double lm = loss_and_gradient(net, x, t, w).total;
    net.params()[k] = saved;
    worst = std::max(worst, testing_oracles::rel_err(grad[k], (lp - lm) / (2 * h)));
  }
  return worst;
}

Outcome gradient_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double theta = 0.0, net = 0.0;
  for (int i = 0; i < 100; ++i) theta = std::max(theta, theta_grad_error(rng));
  for (std::size_t i = 0; i < 100; ++i) net = std::max(net, backward_error(i));
  const double secs = seconds_since(t0);
  return {theta < 1e-4 && net < 1e-4 && secs < 10.0,
          "theta max rel err " + num(theta) + ", backward max rel err " + num(net) + ", " + num(secs) + " s"};
}

// ---------------------------------------------------------------------------
// 2. reward identity

Outcome reward_identity() {
  std::mt19937_64 rng(202);
  std::normal_distribution<double> n(0.0, 0.3);
  opt::Environment env;
  env.model = &kOracle;
  env.episode_periods = 1;
  double worst = 0.0;
  for (int e = 0; e < 20; ++e) {
    const auto p = testing_oracles::random_baseline(rng);
    const Vec2 dir = opt::baseline_direction(env.rollout(p));
    opt::AugmentationPolicy policy(19, 0.05);
    for (double& w : policy.params()) w = n(rng);
    const auto traj = env.rollout(p, &policy);
    const auto r = opt::episode_reward(traj, dir);
    const Vec2 d = traj.states.back().com_position - traj.states.front().com_position;
    worst = std::max(worst, std::abs(r.total - (d.x * dir.x + d.y * dir.y)));
  }
  return {worst <= 1e-12, "max |sum r - d.dir| = " + num(worst) + " over 20 augmented episodes"};
}

// ---------------------------------------------------------------------------
// 3. refit round trip

Outcome refit_round_trip() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  int recovered = 0;
  double worst_loss = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto init = testing_oracles::random_baseline(rng);
    const auto truth = testing_oracles::perturb(init, 0.05, rng);
    const auto res = refit::fit_params(testing_oracles::synthetic_targets(truth, init), init);
    double err = 0.0;
    for (std::size_t k = 0; k < gait::kNumParams; ++k) {
      err = std::max(err, std::abs(res.params.flat()[k] - truth.flat()[k]));
    }
    if (err < 1e-3 && res.loss < 1e-8) ++recovered;
    worst_loss = std::max(worst_loss, res.loss);
  }
  const double secs = seconds_since(t0);
  return {recovered >= 95 && secs < 120.0, std::to_string(recovered) + "/100 recovered, worst final loss " +
                                               num(worst_loss) + ", " + num(secs) + " s"};
}

// ---------------------------------------------------------------------------
// 4. oracle physics

double ellipse_perimeter(double a, double b) {
  const double h = (a - b) * (a - b) / ((a + b) * (a + b));
  return M_PI * (a + b) * (1.0 + 3.0 * h / (10.0 + std::sqrt(4.0 - 3.0 * h)));
}

Outcome oracle_physics() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const kin::BodyGeometry geometry;
  std::size_t checked = 0, violations = 0;
  for (int e = 0; e < 10; ++e) {
    sim::EpisodeSpec spec;
    spec.gait = testing_oracles::random_baseline(rng);
    spec.n_steps = 200;
    spec.initial_heading = M_PI * u(rng);
    spec.record_surfaces = true;
    const auto traj = sim::step_episode(spec, kOracle, geometry);
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
      const auto v = hydro::point_velocities(traj.outlines[k], traj.outlines[k - 1], traj.dt, traj.states[k - 1]);
      for (std::size_t i = 0; i < kin::kOutlinePoints; ++i) {
        ++checked;
        if (dot(traj.forces[k].forces[i], v[i]) > 0.0) ++violations;
      }
    }
  }

  const auto straight = kin::outline_from_angles(std::vector<double>(19, 0.0), geometry);
  const double perimeter = ellipse_perimeter(0.5, 0.05);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double c = 0.5 + std::abs(u(rng));
    kin::SwimmerState s;
    s.heading = M_PI * u(rng);
    s.com_velocity = {0.2 * u(rng), 0.2 * u(rng)};
    const auto f = hydro::resistive_forces(straight, straight, 0.005, hydro::DragCoefficients(c, c), s);
    const Vec2 total = kin::net_wrench(f, straight, s.heading).force;
    const Vec2 expected = s.com_velocity * (-c * perimeter);
    worst = std::max(worst, norm(total - expected) / norm(expected));
  }
  return {violations == 0 && worst < 0.01, std::to_string(violations) + " dissipation violations in " +
                                               std::to_string(checked) + " point-steps, isotropic drag rel err " +
                                               num(worst)};
}

// ---------------------------------------------------------------------------
// 5. surrogate learning

Outcome surrogate_learning() {
  const auto t0 = Clock::now();
  const fs::path cfg_dir = fs::path(SWIMOPT_SOURCE_DIR) / "configs";
  const auto train_cfg = harness::load_config(cfg_dir / "sweep_train.json");
  const auto summary = harness::cmd_sweep_and_train(train_cfg, kWork / "sweep_train");
  const double train_secs = seconds_since(t0);
  const double ratio = summary["loss_ratio"].get<double>();

  const auto t1 = Clock::now();
  auto depth_cfg = harness::load_config(cfg_dir / "depth_sweep.json");
  harness::cmd_depth_sweep(depth_cfg, kWork / "depth_sweep");
  std::ifstream csv(kWork / "depth_sweep" / "depth_sweep.csv");
  std::vector<std::string> rows;
  for (std::string line; std::getline(csv, line);) rows.push_back(line);
  bool depths_ok = rows.size() == 8;
  for (std::size_t d = 1; depths_ok && d <= 7; ++d) depths_ok = rows[d].rfind(std::to_string(d) + ",", 0) == 0;
  const double depth_secs = seconds_since(t1);

  const std::size_t samples = summary["train_samples"].get<std::size_t>() + summary["test_samples"].get<std::size_t>();
  return {ratio < 0.5 && train_secs < 1800.0 && depths_ok,
          std::to_string(samples) + " samples, held-out loss / mean predictor = " + num(ratio) + ", training " +
              num(train_secs) + " s, depth CSV rows for 1-7 " + (depths_ok ? "ok" : "missing") + " (" +
              num(depth_secs) + " s)"};
}

// ---------------------------------------------------------------------------
// 6. optimizer efficacy

bool monotone(const opt::BgpsResult& r) {
  for (std::size_t k = 1; k < r.history.size(); ++k) {
    if (r.history[k].displacement < r.history[k - 1].displacement) return false;
  }
  return true;
}

struct OptimizerRun {
  opt::BgpsResult bgps, hill;
  double bgps_secs = 0.0, hill_secs = 0.0;
};

OptimizerRun run_optimizers(const hydro::ForceModel& model) {
  opt::Environment env;
  env.model = &model;
  const opt::SearchConfig cfg;
  OptimizerRun out;
  auto t0 = Clock::now();
  out.bgps = opt::bgps_loop(detuned(), env, cfg);
  out.bgps_secs = seconds_since(t0);
  t0 = Clock::now();
  out.hill = opt::hill_climb_loop(detuned(), env, cfg);
  out.hill_secs = seconds_since(t0);
  return out;
}

std::string describe(const char* label, const OptimizerRun& r) {
  return std::string(label) + ": bgps " + num(r.bgps.history.front().displacement) + " -> " +
         num(r.bgps.history.back().displacement) + " (" + std::to_string(r.bgps.accepted) + " accepts, " +
         num(r.bgps_secs) + " s), hill climb " + num(r.hill.history.front().displacement) + " -> " +
         num(r.hill.history.back().displacement) + " (" + num(r.hill_secs) + " s)";
}

Outcome optimizer_efficacy() {
  const auto oracle = run_optimizers(kOracle);
  const bool oracle_ok = monotone(oracle.bgps) && monotone(oracle.hill) && oracle.bgps.accepted >= 1 &&
                         oracle.bgps.history.back().displacement > oracle.bgps.history.front().displacement &&
                         oracle.bgps_secs + oracle.hill_secs < 1200.0;
  std::string detail = describe("oracle", oracle);

  bool surrogate_ok = false;
  const fs::path weights = kWork / "sweep_train" / "weights.bin";
  if (fs::exists(weights)) {
    const surrogate::SurrogateForceModel model(
        std::make_shared<const surrogate::SurrogateNetwork>(surrogate::load_weights(weights.string())));
    const auto sur = run_optimizers(model);
    surrogate_ok = monotone(sur.bgps) && monotone(sur.hill) && sur.bgps_secs < 300.0 && sur.hill_secs < 300.0;
    detail += "; " + describe("surrogate", sur);
  } else {
    detail += "; surrogate: no trained weights";
  }
  return {oracle_ok && surrogate_ok, detail};
}

// ---------------------------------------------------------------------------
// 7. determinism

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SWIMOPT_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const fs::path dir = kWork / "determinism";
  fs::create_directories(dir);
  const fs::path gait = fs::path(SWIMOPT_SOURCE_DIR) / "configs" / "default_gait.json";
  const json sweep{{"n_gaits", 6}, {"periods", 1}};
  const json train{{"epochs", 2}, {"width", 32}, {"depth", 2}};
  const std::vector<std::pair<std::string, json>> runs{
      {"simulate", {{"gait_file", gait.string()}, {"simulate", {{"periods", 2}, {"dump_surfaces", true}}}}},
      {"sweep-train", {{"gait_file", gait.string()}, {"sweep", sweep}, {"train", train}}},
      {"depth-sweep",
       {{"gait_file", gait.string()}, {"sweep", sweep}, {"train", train}, {"depth_sweep", {{"depths", {1, 4}}}}}},
      {"optimize",
       {{"gait_file", gait.string()},
        {"optimize", {{"amplitude_scale", 0.5}, {"episode_periods", 1}, {"outer_iterations", 2}}}}},
      {"optimize --method hillclimb",
       {{"gait_file", gait.string()},
        {"optimize", {{"amplitude_scale", 0.5}, {"episode_periods", 1}, {"hill_iterations", 2}}}}},
  };
  std::size_t files = 0;
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const fs::path cfg = dir / ("cfg" + std::to_string(i) + ".json");
    std::ofstream(cfg) << runs[i].second.dump(2);
    const fs::path a = dir / ("a" + std::to_string(i)), b = dir / ("b" + std::to_string(i));
    const std::string common = " --config " + cfg.string() + " --seed 17 --out ";
    if (run_cli(runs[i].first + common + a.string()) != 0 || run_cli(runs[i].first + common + b.string()) != 0) {
      problems.push_back(runs[i].first + " failed");
      continue;
    }
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      ++files;
      if (!fs::exists(b / name) || harness::read_file(a / name) != harness::read_file(b / name)) {
        problems.push_back(runs[i].first + "/" + name.string() + " differs");
      }
    }
  }
  std::string detail = std::to_string(files) + " artifacts compared across " + std::to_string(runs.size()) + " commands";
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty() && files > 0, detail};
}

}  // namespace

int main() {
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"gradient suite", gradient_suite},
      {"reward identity", reward_identity},
      {"refit round trip", refit_round_trip},
      {"oracle physics", oracle_physics},
      {"surrogate learning", surrogate_learning},
      {"optimizer efficacy", optimizer_efficacy},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << criteria[i].first
              << "): " << o.detail << std::endl;
  }
  fs::remove_all(kWork);
  return failures == 0 ? 0 : 1;
}
