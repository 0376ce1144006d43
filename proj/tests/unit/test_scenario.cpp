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

#include <cmath>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "nearfield/rng.hpp"
#include "nearfield/scenario.hpp"

using namespace nearfield;
using doctest::Approx;
using nlohmann::json;

namespace {

std::string error_of(const json& j) {
  try {
    parse_scenario(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& s, const std::string& part) {
  return s.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("minimal config") {
  const Scenario s = parse_scenario(json::parse(R"({"array": {"M": 256, "lambda": 0.003}})"));
  CHECK(s.array.num_antennas() == 256);
  CHECK(s.array.spacing() == Approx(0.0015));
  CHECK(s.single_rounds == 5);
  CHECK(s.cyclic_rounds == 5);
  CHECK(s.codebook.delta_alpha == 0.5);
  CHECK(s.codebook.delta_beta == 1.0);
  CHECK(s.zeta == 3.5);
  CHECK(s.noise_variance == Approx(1e-14));
  REQUIRE(s.bss.size() == 1);
  CHECK(s.bss[0].num_paths == 3);
  CHECK(s.estimator_config().num_paths == 3);
}

TEST_CASE("four-BS scenario file") {
  const Scenario s = load_scenario(NEARFIELD_SCENARIO_DIR "/table2.json");
  REQUIRE(s.bss.size() == 4);
  const double xs[] = {0, 20, 50, 50};
  const double ys[] = {50, 50, 0, 20};
  const double om[] = {std::acos(-1.0), std::acos(-1.0), std::acos(0.0), std::acos(0.0)};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(s.bss[i].config.position.x() == xs[i]);
    CHECK(s.bss[i].config.position.y() == ys[i]);
    CHECK(s.bss[i].config.rotation == Approx(om[i]));
    CHECK(s.bss[i].num_paths == 2);
  }
  CHECK(s.zeta == 3.5);
  CHECK(s.noise_variance == Approx(1e-14));
  CHECK(s.array.num_antennas() == 256);
}

TEST_CASE("round trip") {
  for (const char* name : {"table1.json", "table1_desk.json", "table2.json",
                           "table2_desk.json", "single_path.json"}) {
    const Scenario s = load_scenario(std::filesystem::path(NEARFIELD_SCENARIO_DIR) / name);
    const json j = scenario_to_json(s);
    CHECK(scenario_to_json(parse_scenario(j)) == j);
  }
}

TEST_CASE("field errors") {
  const json base = json::parse(R"({
    "array": {"num_antennas": 64, "wavelength": 0.003},
    "base_stations": [{"position": [0, 0], "rotation": 0,
                       "paths": [{"theta": 1.0, "r": 1.0, "gain": 1.0, "phase": 0.0}]}]
  })");
  CHECK(error_of(base).empty());

  json far = base;
  far["base_stations"][0]["paths"][0]["r"] = 50.0;
  const std::string e1 = error_of(far);
  CHECK(contains(e1, "base_stations[0].paths[0].r"));
  CHECK(contains(e1, "near-field"));

  json near = base;
  near["base_stations"][0]["paths"][0]["r"] = 0.05;
  CHECK(contains(error_of(near), "base_stations[0].paths[0].r"));

  json unknown = base;
  unknown["estimator"] = {{"rounds", 3}};
  CHECK(contains(error_of(unknown), "estimator.rounds"));

  json typed = base;
  typed["zeta"] = "wide";
  CHECK(contains(error_of(typed), "zeta"));

  json angle = base;
  angle["base_stations"][0]["paths"][0]["theta"] = 3.5;
  CHECK(contains(error_of(angle), "paths[0].theta"));

  json version = base;
  version["schema_version"] = 2;
  CHECK(contains(error_of(version), "schema_version"));

  json both = base;
  both["noise_variance"] = 1.0;
  both["noise_variance_dbm"] = -100;
  CHECK(contains(error_of(both), "noise_variance_dbm"));

  CHECK(contains(error_of(json::parse(R"({"array": {"M": 1, "lambda": 0.003}})")), "array"));
  CHECK(contains(error_of(json::array()), "<root>"));
}

TEST_CASE("geometry errors") {
  json j = json::parse(R"({
    "array": {"num_antennas": 64, "wavelength": 0.003},
    "base_stations": [{"position": [0, 0], "rotation": 0, "num_paths": 2}],
    "user": [1.0, 1.0],
    "transmit_power": 1.0
  })");
  CHECK(error_of(j).empty());

  json behind = j;
  behind["user"] = {1.0, -1.0};
  CHECK(contains(error_of(behind), "base_stations[0].rotation"));

  json out = j;
  out["user"] = {10.0, 10.0};
  CHECK(contains(error_of(out), "line-of-sight"));

  json strong = j;
  strong["base_stations"][0]["nlos"] = {{{"theta", 1.0}, {"r", 1.0}, {"gain", 1.0}, {"phase", 0.0}}};
  CHECK(contains(error_of(strong), "base_stations[0].nlos[0].gain"));

  json many = j;
  many["base_stations"][0]["num_paths"] = 1;
  many["base_stations"][0]["nlos"] = {{{"theta", 1.0}, {"r", 1.0}, {"gain", 1e-4}, {"phase", 0.0}}};
  CHECK(contains(error_of(many), "base_stations[0].nlos"));
}

TEST_CASE("missing file") {
  const std::string path = "/nonexistent/scenario.json";
  try {
    load_scenario(path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(contains(e.what(), path));
  }
}

TEST_CASE("drawn paths") {
  const Scenario s = load_scenario(NEARFIELD_SCENARIO_DIR "/table2_desk.json");
  for (std::uint64_t t = 0; t < 50; ++t) {
    const TrialChannels ch = draw_trial(s, derive_seed(s.seed, {t}));
    REQUIRE(ch.paths.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      REQUIRE(ch.has_los[i]);
      REQUIRE(ch.paths[i].size() == 2);
      const auto& los = ch.paths[i][0];
      const auto pp = relative_to_polar(*s.user - s.bss[i].config.position,
                                        s.bss[i].config.rotation);
      CHECK(los.theta == Approx(pp.theta));
      CHECK(los.r == Approx(pp.r));
      CHECK(los.g == Approx(los_gain(s.array.wavelength(), s.transmit_power, pp.r)));
      for (const auto& p : ch.paths[i]) {
        CHECK(s.array.in_near_field(p.r));
        CHECK(p.theta > 0.0);
        CHECK(p.theta < kPi);
        CHECK(p.phi >= 0.0);
        CHECK(p.phi < kTwoPi);
      }
      CHECK(ch.paths[i][1].g <= los.g / 3.0);
      CHECK(ch.paths[i][1].g > 0.0);
    }
  }
  const TrialChannels a = draw_trial(s, 99);
  const TrialChannels b = draw_trial(s, 99);
  CHECK(a.paths[2][1].theta == b.paths[2][1].theta);
}
