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
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "nearfield/rng.hpp"
#include "nearfield/scenario.hpp"
#include "nearfield/sweep.hpp"

using namespace nearfield;
using doctest::Approx;

namespace {

nlohmann::json desk_json() {
  std::ifstream in(NEARFIELD_SCENARIO_DIR "/table2_desk.json");
  return nlohmann::json::parse(in);
}

std::string csv(const SweepResult& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

bool same(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

TEST_CASE("noiseless trial") {
  nlohmann::json j = desk_json();
  for (auto& bs : j["base_stations"]) bs["num_paths"] = 1;
  j.erase("noise_variance_dbm");
  j["noise_variance"] = 0.0;
  const Scenario s = parse_scenario(j);
  const SweepResult r = sweep(s, {.snr_db = {}, .trials = 1, .threads = 1});
  REQUIRE(r.rows.size() == 4);
  CHECK(r.anomalies == 0);
  for (const auto& row : r.rows) {
    CHECK_FALSE(row.anomaly);
    CHECK(row.nmse_db < -100.0);
    CHECK(row.fused_err_m < 1e-6);
    CHECK(row.single_err_m < 1e-6);
    CHECK(std::isinf(row.bs_snr_db));
  }
}

TEST_CASE("row layout and SNR bookkeeping") {
  const Scenario s = load_scenario(NEARFIELD_SCENARIO_DIR "/table2_desk.json");
  const SweepResult r = sweep(s, {.snr_db = {5.0, 15.0}, .trials = 3, .threads = 1});
  REQUIRE(r.rows.size() == 2 * 3 * 4);
  std::size_t k = 0;
  for (int point = 0; point < 2; ++point)
    for (int trial = 0; trial < 3; ++trial) {
      const TrialChannels ch = draw_trial(s, derive_seed(s.seed, {static_cast<std::uint64_t>(trial)}));
      double strongest = -INFINITY;
      for (int bs = 0; bs < 4; ++bs, ++k) {
        const SweepRow& row = r.rows[k];
        CHECK(row.point == point);
        CHECK(row.trial == trial);
        CHECK(row.bs == bs);
        CHECK(row.snr_db == (point == 0 ? 5.0 : 15.0));
        double p = 0.0;
        for (const auto& path : ch.paths[bs]) p += path.g * path.g;
        CHECK(row.bs_snr_db == Approx(10.0 * std::log10(p / row.noise_variance)).epsilon(1e-12));
        strongest = std::max(strongest, row.bs_snr_db);
      }
      CHECK(strongest == Approx(point == 0 ? 5.0 : 15.0).epsilon(1e-12));
    }
}

TEST_CASE("serial and parallel agree") {
  const Scenario s = load_scenario(NEARFIELD_SCENARIO_DIR "/table2_desk.json");
  const SweepOptions serial{.snr_db = {10.0, 20.0}, .trials = 4, .threads = 1};
  SweepOptions parallel = serial;
  parallel.threads = 3;
  const std::string a = csv(sweep(s, serial));
  CHECK(a == csv(sweep(s, parallel)));
  CHECK(a == csv(sweep(s, serial)));
  CHECK(a.rfind(std::string(kSweepCsvHeader) + "\n", 0) == 0);
}

TEST_CASE("CSV round trip") {
  const Scenario s = load_scenario(NEARFIELD_SCENARIO_DIR "/table2_desk.json");
  const SweepResult r = sweep(s, {.snr_db = {10.0, 20.0}, .trials = 5, .threads = 1});
  std::istringstream in(csv(r));
  const SweepResult back = read_csv(in);
  CHECK(csv(back) == csv(r));
  const auto a = summarize(r);
  const auto b = summarize(back);
  REQUIRE(a.size() == b.size());
  CHECK(a.size() == 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].point == b[i].point);
    CHECK(a[i].bs == b[i].bs);
    CHECK(a[i].trials == 5);
    CHECK(same(a[i].median_nmse_db, b[i].median_nmse_db));
    CHECK(same(a[i].median_step3_nmse_db, b[i].median_step3_nmse_db));
    CHECK(same(a[i].theta_rmse, b[i].theta_rmse));
    CHECK(same(a[i].r_rmse, b[i].r_rmse));
    CHECK(same(a[i].single_rmse_m, b[i].single_rmse_m));
    CHECK(same(a[i].fused_rmse_m, b[i].fused_rmse_m));
  }

  std::istringstream bad("snr_db,trial\n1,2\n");
  CHECK_THROWS_AS(read_csv(bad), std::runtime_error);
}

TEST_CASE("median NMSE falls with SNR") {
  const Scenario s = load_scenario(NEARFIELD_SCENARIO_DIR "/table1_desk.json");
  const SweepResult r = sweep(s, {.snr_db = {0.0, 10.0, 20.0, 30.0}, .trials = 60, .threads = 0});
  CHECK(r.anomalies == 0);
  const auto sum = summarize(r);
  REQUIRE(sum.size() == 4);
  for (std::size_t i = 1; i < sum.size(); ++i)
    CHECK(sum[i].median_nmse_db <= sum[i - 1].median_nmse_db);
  CHECK(sum.back().median_nmse_db < -30.0);
}

TEST_CASE("noise for SNR") {
  const std::vector<std::vector<PathParams>> paths{{{1.0, 1.0, 2.0, 0.0}},
                                                   {{1.0, 1.0, 1.0, 0.0}, {1.0, 1.0, 1.0, 0.0}}};
  CHECK(noise_for_snr(paths, 0.0) == Approx(4.0));
  CHECK(noise_for_snr(paths, 10.0) == Approx(0.4));
}
