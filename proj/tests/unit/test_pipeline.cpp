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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "nearfield/channel_model.hpp"
#include "nearfield/metrics.hpp"
#include "nearfield/pipeline.hpp"
#include "nearfield/report.hpp"
#include "nearfield/rng.hpp"
#include "nearfield/scenario.hpp"
#include "oracles.hpp"

using namespace nearfield;
using doctest::Approx;

namespace {

struct Draw {
  std::vector<BsObservation> obs;
  TrialChannels truth;
};

Draw observe(const Scenario& s, std::uint64_t trial) {
  Draw d;
  d.truth = draw_trial(s, derive_seed(s.seed, {trial}));
  const auto bss = s.bs_configs();
  for (std::size_t i = 0; i < bss.size(); ++i) {
    const CVector h = synthesize_channel(s.array, d.truth.paths[i]);
    d.obs.push_back({bss[i], add_noise(h, s.noise_variance, derive_seed(trial, {7, i})), h});
  }
  return d;
}

Scenario desk_los_only() {
  Scenario s = load_scenario(NEARFIELD_SCENARIO_DIR "/table2_desk.json");
  for (auto& bs : s.bss) bs.num_paths = 1;
  s.estimator_paths = 1;
  return s;
}

}  // namespace

TEST_CASE("single BS anchors on its own estimate") {
  Scenario s = load_scenario(NEARFIELD_SCENARIO_DIR "/single_path.json");
  const EstimatorConfig cfg = s.estimator_config();
  const Draw d = observe(s, 0);
  const JointResult r = run_joint(d.obs, cfg);
  REQUIRE(r.per_bs.size() == 1);
  const auto& bs = r.per_bs[0];
  REQUIRE(bs.anchored);
  CHECK_FALSE(r.step3_skipped);
  REQUIRE(bs.anchor_path);
  const auto& before = bs.step1[*bs.anchor_path].params;
  const auto& after = bs.step3[*bs.anchor_path].params;
  CHECK(after.theta == Approx(before.theta).epsilon(1e-12));
  CHECK(after.r == Approx(before.r).epsilon(1e-12));
  CHECK(after.g == Approx(before.g).epsilon(1e-9));
  CHECK(std::abs(to_db(*bs.nmse_after) - to_db(*bs.nmse_before)) < 1e-6);
}

TEST_CASE("anchored path follows the fused position") {
  Scenario s = load_scenario(NEARFIELD_SCENARIO_DIR "/table2_desk.json");
  const EstimatorConfig cfg = s.estimator_config();
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const Draw d = observe(s, trial);
    const JointResult r = run_joint(d.obs, cfg);
    for (const auto& in : r.step2.inputs) {
      const auto& bs = r.per_bs[in.bs];
      CHECK(bs.anchored == (in.eta == 1));
      CHECK(bs.nmse_before.has_value());
      if (!bs.anchored) {
        CHECK(bs.step3.empty());
        CHECK_FALSE(bs.nmse_after.has_value());
        continue;
      }
      REQUIRE(bs.anchor_path);
      CHECK(*bs.anchor_path == in.path);
      const auto pp = relative_to_polar(r.step2.fused.mean - d.obs[in.bs].bs.position,
                                        d.obs[in.bs].bs.rotation);
      const auto& p = bs.step3[in.path].params;
      CHECK(p.theta == Approx(pp.theta).epsilon(1e-12));
      CHECK(p.r == Approx(std::clamp(pp.r, s.array.min_distance(),
                                     s.array.rayleigh_distance()))
                       .epsilon(1e-12));
    }
  }
}

TEST_CASE("injected true position matches the oracle") {
  const Scenario s = desk_los_only();
  const EstimatorConfig cfg = s.estimator_config();
  JointOptions opt;
  opt.injected_user_position = *s.user;
  int compared = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const Draw d = observe(s, trial);
    const JointResult r = run_joint(d.obs, cfg, opt);
    for (std::size_t i = 0; i < r.per_bs.size(); ++i) {
      const auto& bs = r.per_bs[i];
      if (!bs.anchored) continue;
      const PathParams& truth = d.truth.paths[i][0];
      const PathParams& p = bs.step3[*bs.anchor_path].params;
      CHECK(p.theta == Approx(truth.theta).epsilon(1e-12));
      CHECK(p.r == Approx(truth.r).epsilon(1e-12));
      const auto oracle = oracle_ls(s.array, d.obs[i].measurement.y, d.truth.paths[i]);
      const double oracle_db = to_db(nmse(*d.obs[i].true_channel, oracle.channel));
      CHECK(to_db(*bs.nmse_after) <= oracle_db + 0.5);
      ++compared;
    }
  }
  CHECK(compared > 40);
}

TEST_CASE("step 3 skipped") {
  Scenario s = load_scenario(NEARFIELD_SCENARIO_DIR "/table2_desk.json");
  JointOptions opt;
  // Behind every array.
  opt.injected_user_position = Eigen::Vector2d(10.0, 10.0);
  const Draw d = observe(s, 0);
  const JointResult r = run_joint(d.obs, s.estimator_config(), opt);
  CHECK(r.step3_skipped);
  for (const auto& bs : r.per_bs) CHECK_FALSE(bs.anchored);

  CHECK_THROWS_AS(run_joint(std::span<const BsObservation>{}, s.estimator_config()),
                  std::invalid_argument);
}

TEST_CASE("deterministic") {
  Scenario s = load_scenario(NEARFIELD_SCENARIO_DIR "/table2_desk.json");
  const Draw d = observe(s, 3);
  const auto cfg = s.estimator_config();
  const std::string a = to_json(run_joint(d.obs, cfg)).dump();
  const std::string b = to_json(run_joint(d.obs, s.estimator_config())).dump();
  CHECK(a == b);
}

TEST_CASE("reconstruct") {
  const ArrayConfig array(64, 0.003);
  const std::vector<PathParams> paths{{1.0, 1.2, 0.8, 0.1}, {2.0, 2.5, 0.3, 4.0}};
  std::vector<SoftEstimate> est;
  for (const auto& p : paths) est.push_back({p, Eigen::Matrix4d::Identity()});
  CHECK((reconstruct(array, est) - synthesize_channel(array, paths)).norm() < 1e-12);
}
