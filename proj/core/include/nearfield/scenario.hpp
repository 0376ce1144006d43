// Copyright 2026 The nearfield Authors
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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nearfield/codebook.hpp"
#include "nearfield/localization.hpp"
#include "nearfield/vnnce.hpp"

namespace nearfield {

inline constexpr int kScenarioSchemaVersion = 1;

/// Raised for unreadable, malformed or physically invalid scenario files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BsSpec {
  BsConfig config;
  /// Total number of paths L^i, line-of-sight included.
  int num_paths = 2;
  /// Generate the line-of-sight path from the user position.
  bool los = true;
  /// Fixed non-line-of-sight paths; missing ones are drawn per trial.
  std::vector<PathParams> nlos;
  /// Complete fixed path list; overrides los / nlos / num_paths.
  std::vector<PathParams> paths;
};

struct Scenario {
  ArrayConfig array{256, 0.003};
  std::vector<BsSpec> bss;
  std::optional<Eigen::Vector2d> user;
  double transmit_power = 1.0;
  double noise_variance = 1e-14;  ///< W, -110 dBm
  std::size_t estimator_paths = 0;  ///< 0: the largest num_paths over BSs
  int single_rounds = 5;
  int cyclic_rounds = 5;
  NewtonCurvature curvature = NewtonCurvature::kProfiledGain;
  CodebookConfig codebook;
  double zeta = kDefaultConsistencyThreshold;
  std::uint64_t seed = 1;

  /// Estimator configuration with a freshly built codebook.
  EstimatorConfig estimator_config() const;
  EstimatorConfig estimator_config(std::shared_ptr<const Codebook> cb) const;
  std::vector<BsConfig> bs_configs() const;
};

/// Parses and validates a scenario; defaults fill omitted fields.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const Scenario& s);

/// Ground-truth paths of every BS for one trial. Path 0 is the line-of-sight
/// path whenever the BS has one.
struct TrialChannels {
  std::vector<std::vector<PathParams>> paths;
  std::vector<bool> has_los;
};

TrialChannels draw_trial(const Scenario& s, std::uint64_t trial_seed);

}  // namespace nearfield
