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

#include "nearfield/pipeline.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "nearfield/metrics.hpp"

namespace nearfield {

CVector reconstruct(const ArrayConfig& cfg, std::span<const SoftEstimate> est) {
  return residual(cfg, CVector::Zero(cfg.num_antennas()), est) * -1.0;
}

JointResult run_joint(std::span<const BsObservation> observations,
                      const EstimatorConfig& est_cfg,
                      const JointOptions& options, const RefineHook& hook) {
  est_cfg.validate();
  if (observations.empty())
    throw std::invalid_argument("run_joint: no observations");
  const auto& array = est_cfg.codebook->array();

  JointResult result;
  result.per_bs.resize(observations.size());
  std::vector<std::vector<SoftEstimate>> step1(observations.size());
  std::vector<BsConfig> bss;
  std::vector<Measurement> measurements;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& obs = observations[i];
    if (obs.bs.array.num_antennas() != array.num_antennas())
      throw std::invalid_argument("run_joint: BS array does not match codebook");
    step1[i] = vnnce(obs.measurement, est_cfg, hook);
    result.per_bs[i].step1 = step1[i];
    if (obs.true_channel)
      result.per_bs[i].nmse_before =
          nmse(*obs.true_channel, reconstruct(array, step1[i]));
    bss.push_back(obs.bs);
    measurements.push_back(obs.measurement);
  }

  result.step2 = gfcl(step1, bss, measurements, options.zeta, options.mode);
  const Eigen::Vector2d user =
      options.injected_user_position.value_or(result.step2.fused.mean);

  std::size_t anchored = 0;
  for (const auto& entry : result.step2.inputs) {
    if (!entry.eta) continue;
    const auto& obs = observations[entry.bs];
    const Eigen::Vector2d rel = user - obs.bs.position;
    if (!(rel.norm() > 0.0)) continue;
    const auto polar = relative_to_polar(rel, obs.bs.rotation);
    if (!polar.front_side) continue;

    auto& out = result.per_bs[entry.bs];
    std::vector<SoftEstimate> est = step1[entry.bs];
    const std::size_t los = entry.path;
    const double theta = std::clamp(polar.theta, 1e-6, kPi - 1e-6);
    const double r =
        std::clamp(polar.r, array.min_distance(), array.rayleigh_distance());
    std::vector<SoftEstimate> others;
    for (std::size_t k = 0; k < est.size(); ++k)
      if (k != los) others.push_back(est[k]);
    const CVector y_los = residual(array, obs.measurement.y, others);
    est[los].params = with_ls_gain(array, y_los, theta, r);

    auto frozen = std::make_unique<bool[]>(est.size());
    frozen[los] = true;
    refine_cyclic(array, obs.measurement, est,
                  std::span<const bool>(frozen.get(), est.size()), est_cfg,
                  hook);

    out.step3 = est;
    out.anchored = true;
    out.anchor_path = los;
    if (obs.true_channel)
      out.nmse_after = nmse(*obs.true_channel, reconstruct(array, est));
    ++anchored;
  }
  result.step3_skipped = anchored == 0;
  return result;
}

}  // namespace nearfield
