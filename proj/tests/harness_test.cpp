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

#include "swimopt/harness/commands.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace swimopt::harness {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("swimopt_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const json& j) const {
    const auto p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  int run(const std::string& args, const std::string& log = "cli.log") const {
    const std::string cmd = std::string(SWIMOPT_CLI) + " " + args + " > " + (dir_ / log).string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string log(const std::string& name = "cli.log") const { return read_file(dir_ / name); }

  static std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  }

  fs::path dir_;
};

json small_sweep() {
  return json{{"seed", 3},
              {"sweep", {{"n_gaits", 5}, {"periods", 1}}},
              {"train", {{"epochs", 1}, {"width", 16}, {"depth", 1}, {"batch_size", 32}}}};
}

json small_optimize(const std::string& method) {
  return json{{"seed", 2},
              {"optimize",
               {{"method", method},
                {"amplitude_scale", 0.5},
                {"episode_periods", 1},
                {"outer_iterations", 1},
                {"search_iterations", 1},
                {"population", 1},
                {"hill_iterations", 1}}}};
}

// ---------------------------------------------------------------------------

TEST(ConfigTest, DefaultsRoundTripThroughJson) {
  const RunConfig c;
  const auto j = to_json(c);
  EXPECT_EQ(to_json(parse_config(j)), j);
  EXPECT_EQ(c.optimize.search.epsilon, 0.05);
  EXPECT_EQ(c.train.epochs, 20u);
}

TEST(ConfigTest, UnknownKeysAreRejectedWithPath) {
  try {
    parse_config(json{{"optimize", {{"epsilon", 0.1}, {"epsilonn", 0.2}}}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("config.optimize.epsilonn"), std::string::npos);
  }
  EXPECT_THROW(parse_config(json{{"bogus", 1}}), ConfigError);
}

TEST(ConfigTest, WrongTypesAndRangesAreRejected) {
  EXPECT_THROW(parse_config(json{{"seed", "one"}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"train", {{"momentum", 1.0}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"train", {{"width", 0}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"hydro", {{"model", "cfd"}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"optimize", {{"method", "annealing"}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"optimize", {{"epsilon", -0.1}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"sweep", {{"amplitude_scale", {2.0, 1.0}}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"sweep", {{"gaits", {{1.0, 2.0}}}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"depth_sweep", {{"depths", {1, 0}}}}}), ConfigError);
  EXPECT_THROW(parse_config(json::array()), ConfigError);
}

TEST(ConfigTest, RelativePathsResolveAgainstConfigDirectory) {
  const auto c = parse_config(json{{"gait_file", "g.json"}}, "/data/runs");
  EXPECT_EQ(c.resolve(c.gait_file), fs::path("/data/runs/g.json"));
  EXPECT_EQ(c.resolve("/abs/g.json"), fs::path("/abs/g.json"));
}

TEST(GaitFileTest, ParsesAndRejects) {
  const auto p = gait_from_json(json{{"params", {0.1, 0.1, 0, 0, 0, 0, 0, -6, 0, 0, 0, 6.25}}}, "g");
  EXPECT_EQ(p.omega(), 6.25);
  EXPECT_EQ(gait_from_json(gait_to_json(p), "g"), p);
  EXPECT_THROW(gait_from_json(json{{"params", {1, 2, 3}}}, "g"), ConfigError);
  EXPECT_THROW(gait_from_json(json{{"params", {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1}}}, "g"), ConfigError);
  EXPECT_THROW(gait_from_json(json{{"params", {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}}, {"x", 1}}, "g"), ConfigError);
  EXPECT_THROW(load_gait("/nonexistent/gait.json"), ConfigError);
}

TEST(GaitFileTest, BundledDefaultMatchesLibraryDefault) {
  EXPECT_EQ(load_gait(fs::path(SWIMOPT_SOURCE_DIR) / "configs" / "default_gait.json"), gait::default_gait());
}

TEST(IoTest, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(IoTest, NumberFormattingRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.283185307179586, 0.0}) EXPECT_EQ(std::strtod(fmt(v).c_str(), nullptr), v);
  EXPECT_EQ(fmt(0.1), "0.1");
  EXPECT_EQ(fmt(std::nan("")), "nan");
}

TEST(IoTest, TraceCsvHasFixedHeader) {
  opt::TraceRow row;
  row.phase = "init";
  const auto csv = trace_csv({row});
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "iteration,phase,displacement,return,refit_loss,p_1,p_2,p_3,p_4,p_5,p_6,p_7,p_8,p_9,p_10,p_11,p_12");
}

// ---------------------------------------------------------------------------

TEST_F(CliTest, SimulateZeroAmplitudeStaysPut) {
  write("zero.json", json{{"params", {0, 0, 0, 0, 0, 0, 0, -6, 0, 0, 0, 6.283185307179586}}});
  const auto cfg = write("cfg.json", json{{"gait_file", "zero.json"}, {"simulate", {{"periods", 1}}}});
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + (dir_ / "out").string()), 0) << log();
  const auto summary = json::parse(read_file(dir_ / "out" / "summary.json"));
  EXPECT_EQ(summary["displacement_norm"].get<double>(), 0.0);
  EXPECT_EQ(summary["steps"].get<std::size_t>(), 200u);
  const auto rows = lines(read_file(dir_ / "out" / "trajectory.csv"));
  EXPECT_EQ(rows.size(), 202u);
  EXPECT_EQ(rows[0].substr(0, 22), "time,com_x,com_y,headi");
}

TEST_F(CliTest, SimulateWritesRunRecordWithDigests) {
  const auto cfg = write("cfg.json", json{{"simulate", {{"periods", 1}, {"dump_surfaces", true}}}});
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --seed 9 --out " + (dir_ / "out").string()), 0) << log();
  const auto record = json::parse(read_file(dir_ / "out" / "run.json"));
  EXPECT_EQ(record["command"], "simulate");
  EXPECT_EQ(record["seed"], 9);
  for (const char* name : {"trajectory.csv", "surfaces.csv", "summary.json"}) {
    EXPECT_EQ(record["artifacts"][name], sha256_hex(read_file(dir_ / "out" / name))) << name;
  }
  EXPECT_EQ(lines(read_file(dir_ / "out" / "surfaces.csv")).size(), 1u + 201u * kin::kOutlinePoints);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  const auto cfg = write("cfg.json", json{{"simulate", {{"periods", 1}}}});
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + (dir_ / "b").string()), 0);
  for (const char* name : {"trajectory.csv", "summary.json", "run.json"}) {
    EXPECT_EQ(read_file(dir_ / "a" / name), read_file(dir_ / "b" / name)) << name;
  }
}

TEST_F(CliTest, SurrogateWithoutWeightsFailsWithoutOutput) {
  const auto cfg = write("cfg.json", json{{"hydro", {{"model", "surrogate"}}}});
  EXPECT_EQ(run("simulate --config " + cfg.string() + " --out " + (dir_ / "out").string()), 2);
  EXPECT_NE(log().find("weights"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
  const auto missing = write("cfg2.json", json{{"hydro", {{"model", "surrogate"}, {"weights", "nope.bin"}}}});
  EXPECT_NE(run("simulate --config " + missing.string() + " --out " + (dir_ / "out").string()), 0);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, UnknownConfigKeyFails) {
  const auto cfg = write("cfg.json", json{{"simulate", {{"period", 1}}}});
  EXPECT_EQ(run("simulate --config " + cfg.string() + " --out " + (dir_ / "out").string()), 2);
  EXPECT_NE(log().find("config.simulate.period"), std::string::npos);
  EXPECT_NE(run("simulate --config " + (dir_ / "missing.json").string()), 0);
  EXPECT_NE(run("frobnicate"), 0);
}

TEST_F(CliTest, InvalidSweepGaitNamesItsIndex) {
  auto j = small_sweep();
  j["sweep"]["gaits"] = {{0.1, 0.1, 0, 0, 0, 0, 0, -6, 0, 0, 0, 6.0}, {0.1, 0.1, 0, 0, 0, 0, 0, -6, 0, 0, 0, -6.0}};
  const auto cfg = write("cfg.json", j);
  EXPECT_EQ(run("sweep-train --config " + cfg.string() + " --out " + (dir_ / "out").string()), 2);
  EXPECT_NE(log().find("sweep gait 1"), std::string::npos) << log();
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, SweepTrainWithZeroEpochsWritesHeaderOnlyCurve) {
  auto j = small_sweep();
  j["train"]["epochs"] = 0;
  const auto cfg = write("cfg.json", j);
  ASSERT_EQ(run("sweep-train --config " + cfg.string() + " --out " + (dir_ / "out").string()), 0) << log();
  EXPECT_EQ(read_file(dir_ / "out" / "loss_curve.csv"), "epoch,train_loss,test_loss,mse_part,cos_part\n");
  const auto weights = surrogate::load_weights(dir_ / "out" / "weights.bin");
  EXPECT_EQ(weights.shape().depth, 1u);
  EXPECT_EQ(weights.shape().width, 16u);
  const auto manifest = json::parse(read_file(dir_ / "out" / "dataset.json"));
  EXPECT_EQ(manifest["gaits"].size(), 5u);
  EXPECT_EQ(manifest["test_gaits"].size(), 1u);
}

TEST_F(CliTest, SweepTrainIsDeterministicAndReplaysManifest) {
  const auto cfg = write("cfg.json", small_sweep());
  ASSERT_EQ(run("sweep-train --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0) << log();
  ASSERT_EQ(run("sweep-train --config " + cfg.string() + " --out " + (dir_ / "b").string()), 0);
  for (const char* name : {"dataset.json", "weights.bin", "loss_curve.csv", "summary.json", "run.json"}) {
    EXPECT_EQ(read_file(dir_ / "a" / name), read_file(dir_ / "b" / name)) << name;
  }
  EXPECT_EQ(lines(read_file(dir_ / "a" / "loss_curve.csv")).size(), 2u);

  auto j = small_sweep();
  j["sweep"] = {{"manifest", (dir_ / "a" / "dataset.json").string()}};
  const auto replay = write("replay.json", j);
  ASSERT_EQ(run("sweep-train --config " + replay.string() + " --out " + (dir_ / "c").string()), 0) << log();
  EXPECT_EQ(read_file(dir_ / "a" / "weights.bin"), read_file(dir_ / "c" / "weights.bin"));
}

TEST_F(CliTest, TrainedWeightsDriveSurrogateSimulation) {
  const auto cfg = write("cfg.json", small_sweep());
  ASSERT_EQ(run("sweep-train --config " + cfg.string() + " --out " + (dir_ / "train").string()), 0) << log();
  const auto sim = write("sim.json", json{{"hydro", {{"model", "surrogate"}, {"weights", "train/weights.bin"}}},
                                         {"simulate", {{"periods", 1}}}});
  ASSERT_EQ(run("simulate --config " + sim.string() + " --out " + (dir_ / "out").string()), 0) << log();
  const auto summary = json::parse(read_file(dir_ / "out" / "summary.json"));
  EXPECT_TRUE(std::isfinite(summary["displacement_norm"].get<double>()));
}

TEST_F(CliTest, DepthSweepWritesOneRowPerDepth) {
  auto j = small_sweep();
  j["depth_sweep"] = {{"depths", {1}}};
  auto cfg = write("one.json", j);
  ASSERT_EQ(run("depth-sweep --config " + cfg.string() + " --out " + (dir_ / "one").string()), 0) << log();
  auto rows = lines(read_file(dir_ / "one" / "depth_sweep.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "depth,train_loss,test_loss");
  EXPECT_EQ(rows[1].substr(0, 2), "1,");

  j["depth_sweep"] = {{"depths", {1, 2, 3, 4, 5, 6, 7}}, {"epochs", 0}};
  cfg = write("all.json", j);
  ASSERT_EQ(run("depth-sweep --config " + cfg.string() + " --out " + (dir_ / "all").string()), 0) << log();
  rows = lines(read_file(dir_ / "all" / "depth_sweep.csv"));
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t d = 1; d <= 7; ++d) EXPECT_EQ(rows[d].substr(0, 2), std::to_string(d) + ",");
}

TEST_F(CliTest, BgpsWithZeroOuterIterationsKeepsStart) {
  auto j = small_optimize("bgps");
  j["optimize"]["outer_iterations"] = 0;
  const auto cfg = write("cfg.json", j);
  ASSERT_EQ(run("optimize --config " + cfg.string() + " --out " + (dir_ / "out").string()), 0) << log();
  EXPECT_EQ(lines(read_file(dir_ / "out" / "trace.csv")).size(), 2u);
  const auto final_gait = load_gait(dir_ / "out" / "final_gait.json");
  EXPECT_EQ(final_gait, gait::default_gait().scaled_amplitude(0.5));
  const auto history = json::parse(read_file(dir_ / "out" / "history.json"));
  EXPECT_EQ(history["history"].size(), 1u);
}

TEST_F(CliTest, BothMethodsShareTraceSchemaAndNeverWorsen) {
  const auto cfg = write("cfg.json", small_optimize("bgps"));
  ASSERT_EQ(run("optimize --config " + cfg.string() + " --out " + (dir_ / "bgps").string()), 0) << log();
  ASSERT_EQ(run("optimize --method hillclimb --config " + cfg.string() + " --out " + (dir_ / "hill").string()), 0)
      << log();
  const auto a = lines(read_file(dir_ / "bgps" / "trace.csv"));
  const auto b = lines(read_file(dir_ / "hill" / "trace.csv"));
  ASSERT_GE(a.size(), 3u);
  ASSERT_GE(b.size(), 3u);
  EXPECT_EQ(a[0], b[0]);
  for (const char* m : {"bgps", "hill"}) {
    const auto s = json::parse(read_file(dir_ / m / "summary.json"));
    EXPECT_GE(s["final_displacement"].get<double>(), s["initial_displacement"].get<double>()) << m;
  }
  EXPECT_EQ(json::parse(read_file(dir_ / "hill" / "summary.json"))["method"], "hillclimb");
}

TEST_F(CliTest, OptimizeIsDeterministic) {
  const auto cfg = write("cfg.json", small_optimize("bgps"));
  ASSERT_EQ(run("optimize --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0) << log();
  ASSERT_EQ(run("optimize --config " + cfg.string() + " --out " + (dir_ / "b").string()), 0);
  for (const char* name : {"trace.csv", "final_gait.json", "history.json", "summary.json", "run.json"}) {
    EXPECT_EQ(read_file(dir_ / "a" / name), read_file(dir_ / "b" / name)) << name;
  }
}

}  // namespace
}  // namespace swimopt::harness
