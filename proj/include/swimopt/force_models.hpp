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

#include <memory>

#include "swimopt/errors.hpp"
#include "swimopt/hydro.hpp"
#include "swimopt/surrogate/model.hpp"

namespace swimopt {

enum class ForceModelKind { oracle, surrogate };

struct ForceModelConfig {
  ForceModelKind kind = ForceModelKind::oracle;
  hydro::DragCoefficients drag;
  std::shared_ptr<const surrogate::SurrogateNetwork> network;  // surrogate only
};

/// Oracle reads one past outline, the surrogate three. Throws ConfigError for
/// a surrogate without trained weights.
inline std::unique_ptr<hydro::ForceModel> make_force_model(const ForceModelConfig& cfg) {
  switch (cfg.kind) {
    case ForceModelKind::oracle:
      return std::make_unique<hydro::ResistiveForceModel>(cfg.drag);
    case ForceModelKind::surrogate:
      if (!cfg.network) throw ConfigError("surrogate force model requested without weights");
      return std::make_unique<surrogate::SurrogateForceModel>(cfg.network);
  }
  throw ConfigError("unknown force model kind");
}

}  // namespace swimopt
