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

// Swims the default gait and a detuned copy with the resistive oracle, then
// hill-climbs the detuned gait for a few iterations.

#include <iostream>

#include "swimopt/hydro.hpp"
#include "swimopt/optimize.hpp"
#include "swimopt/simulate.hpp"

int main() {
  using namespace swimopt;
  const hydro::ResistiveForceModel oracle;
  opt::Environment env;
  env.model = &oracle;

  for (double scale : {1.0, 0.5}) {
    const auto traj = env.rollout(gait::default_gait().scaled_amplitude(scale));
    const Vec2 d = traj.displacement();
    std::cout << "amplitude x" << scale << ": displacement (" << d.x << ", " << d.y << "), |d| = " << norm(d)
              << " over " << traj.states.back().time << " s\n";
  }

  opt::SearchConfig cfg;
  cfg.hill_iterations = 3;
  const auto res = opt::hill_climb_loop(gait::default_gait().scaled_amplitude(0.5), env, cfg);
  for (const auto& row : res.trace) {
    std::cout << "hill climb " << row.iteration << " " << row.phase << " |d| = " << row.displacement << "\n";
  }
}
