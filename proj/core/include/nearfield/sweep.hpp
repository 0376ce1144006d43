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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nearfield/pipeline.hpp"
#include "nearfield/scenario.hpp"

namespace nearfield {

/// Columns written by write_csv, in order.
inline constexpr const char* kSweepCsvHeader =
    "snr_db,trial,bs,nmse_db,theta_rmse,r_rmse,single_rmse_m,fused_rmse_m,"
    "step3_nmse_db,bs_snr_db,noise_variance,point,anomaly";

/// One (grid point, trial, BS) record. Error columns hold the single-trial
/// absolute error; RMSE is formed across trials by summarize(). Missing
/// quantities are NaN.
struct SweepRow {
  double snr_db = 0.0;
  int trial = 0;
  int bs = 0;
  double nmse_db = 0.0;
  double theta_err = 0.0;
  double r_err = 0.0;
  double single_err_m = 0.0;
  double fused_err_m = 0.0;
  double step3_nmse_db = 0.0;
  /// Received SNR sum_l g_l^2 / sigma^2 of this BS.
  double bs_snr_db = 0.0;
  double noise_variance = 0.0;
  int point = 0;
  bool anomaly = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t anomalies = 0;
};

struct SweepOptions {
  /// Received SNR of the strongest BS per grid point. Empty: one point at
  /// the scenario noise variance.
  std::vector<double> snr_db;
  int trials = 1;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 1;
};

/// Noise variance that puts the strongest BS at received SNR snr_db, with
/// SNR = sum_l g_l^2 / sigma^2.
double noise_for_snr(std::span<const std::vector<PathParams>> per_bs_paths,
                     double snr_db);

/// Joint pipeline over every (grid point, trial). Trial t draws its channels
/// from derive_seed(scenario.seed, {t}) and its noise from a further split
/// keyed by (point, BS), so the output does not depend on scheduling.
SweepResult sweep(const Scenario& scenario, const SweepOptions& options,
                  const RefineHook& hook = {});

void write_csv(std::ostream& os, const SweepResult& result);
/// Inverse of write_csv. Throws std::runtime_error on a malformed file.
SweepResult read_csv(std::istream& is);

struct SweepSummary {
  int point = 0;
  int bs = 0;
  double snr_db = 0.0;  ///< first row of the group
  std::size_t trials = 0;
  double median_nmse_db = 0.0;
  double median_step3_nmse_db = 0.0;
  double theta_rmse = 0.0;
  double r_rmse = 0.0;
  double single_rmse_m = 0.0;
  double fused_rmse_m = 0.0;
};

/// Per (point, BS) statistics; NaN entries are skipped, all-NaN groups
/// report NaN.
std::vector<SweepSummary> summarize(const SweepResult& result);

}  // namespace nearfield
