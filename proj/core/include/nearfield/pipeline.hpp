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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nearfield/localization.hpp"
#include "nearfield/vnnce.hpp"

namespace nearfield {

struct BsObservation {
  BsConfig bs;
  Measurement measurement;
  /// Ground-truth channel; when present NMSE is recorded.
  std::optional<CVector> true_channel;
};

struct JointOptions {
  double zeta = kDefaultConsistencyThreshold;
  PositionCovarianceMode mode = PositionCovarianceMode::kProfiledGain;
  /// Replaces the fused position used for anchoring (testing hook).
  std::optional<Eigen::Vector2d> injected_user_position;
};

struct BsJointResult {
  std::vector<SoftEstimate> step1;
  /// Refined estimates; empty unless the BS was anchored.
  std::vector<SoftEstimate> step3;
  bool anchored = false;
  std::optional<std::size_t> anchor_path;
  std::optional<double> nmse_before;
  std::optional<double> nmse_after;
};

struct JointResult {
  std::vector<BsJointResult> per_bs;
  FusionReport step2;
  /// No BS could be anchored.
  bool step3_skipped = false;
};

/// Per-BS estimation, cooperative localization, then refinement of every
/// gated BS with its line-of-sight geometry pinned to the fused position.
JointResult run_joint(std::span<const BsObservation> observations,
                      const EstimatorConfig& est_cfg,
                      const JointOptions& options = {},
                      const RefineHook& hook = {});

/// Channel reconstructed from a list of estimates.
CVector reconstruct(const ArrayConfig& cfg, std::span<const SoftEstimate> est);

}  // namespace nearfield
