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

#include "nearfield/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "nearfield/channel_model.hpp"
#include "nearfield/metrics.hpp"
#include "nearfield/rng.hpp"

namespace nearfield {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double received_power(std::span<const PathParams> paths) {
  double p = 0.0;
  for (const auto& q : paths) p += q.g * q.g;
  return p;
}

// Estimate nearest to the true path in the array's Cartesian frame.
const SoftEstimate* nearest(std::span<const SoftEstimate> est, const PathParams& truth) {
  const Eigen::Vector2d t = polar_to_relative(truth.theta, truth.r, 0.0);
  const SoftEstimate* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& e : est) {
    const double d = (polar_to_relative(e.params.theta, e.params.r, 0.0) - t).norm();
    if (d < best_d) {
      best_d = d;
      best = &e;
    }
  }
  return best;
}

std::vector<SweepRow> run_trial(const Scenario& s, const EstimatorConfig& est_cfg,
                                const SweepOptions& opt, int point, int trial,
                                const RefineHook& hook) {
  const std::uint64_t trial_seed = derive_seed(s.seed, {static_cast<std::uint64_t>(trial)});
  const TrialChannels ch = draw_trial(s, trial_seed);
  const std::size_t nbs = s.bss.size();

  std::vector<CVector> h(nbs);
  for (std::size_t i = 0; i < nbs; ++i)
    h[i] = synthesize_channel(s.array, ch.paths[i]);

  double sigma2 = s.noise_variance;
  double snr_db = kNan;
  if (!opt.snr_db.empty()) {
    snr_db = opt.snr_db[static_cast<std::size_t>(point)];
    sigma2 = noise_for_snr(ch.paths, snr_db);
  }

  std::vector<SweepRow> rows(nbs);
  double strongest = 0.0;
  for (std::size_t i = 0; i < nbs; ++i) {
    SweepRow& row = rows[i];
    row.trial = trial;
    row.bs = static_cast<int>(i);
    row.point = point;
    row.noise_variance = sigma2;
    const double p = received_power(ch.paths[i]);
    strongest = std::max(strongest, p);
    row.bs_snr_db = sigma2 > 0.0 ? to_db(p / sigma2) : std::numeric_limits<double>::infinity();
    row.nmse_db = row.theta_err = row.r_err = row.single_err_m = row.fused_err_m =
        row.step3_nmse_db = kNan;
  }
  if (opt.snr_db.empty())
    snr_db = sigma2 > 0.0 ? to_db(strongest / sigma2) : std::numeric_limits<double>::infinity();
  for (auto& row : rows) row.snr_db = snr_db;

  try {
    std::vector<BsObservation> obs;
    for (std::size_t i = 0; i < nbs; ++i) {
      const std::uint64_t noise_seed =
          derive_seed(trial_seed, {1, static_cast<std::uint64_t>(point), i});
      obs.push_back({s.bss[i].config, add_noise(h[i], sigma2, noise_seed), h[i]});
    }
    JointOptions jopt;
    jopt.zeta = s.zeta;
    const JointResult jr = run_joint(obs, est_cfg, jopt, hook);

    for (std::size_t i = 0; i < nbs; ++i) {
      SweepRow& row = rows[i];
      const BsJointResult& b = jr.per_bs[i];
      if (b.nmse_before) row.nmse_db = to_db(*b.nmse_before);
      row.step3_nmse_db = b.nmse_after ? to_db(*b.nmse_after) : row.nmse_db;
      if (ch.has_los[i]) {
        const auto& final_est = b.step3.empty() ? b.step1 : b.step3;
        if (const SoftEstimate* e = nearest(final_est, ch.paths[i][0])) {
          row.theta_err = std::abs(e->params.theta - ch.paths[i][0].theta);
          row.r_err = std::abs(e->params.r - ch.paths[i][0].r);
        }
      }
      if (s.user) {
        for (const auto& in : jr.step2.inputs)
          if (in.bs == i) row.single_err_m = (in.position.mean - *s.user).norm();
        row.fused_err_m = (jr.step2.fused.mean - *s.user).norm();
      }
    }
  } catch (const std::exception&) {
    for (auto& row : rows) row.anomaly = true;
  }
  return rows;
}

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

double parse_double(const std::string& f) {
  if (f == "nan" || f == "-nan") return kNan;
  if (f == "inf") return std::numeric_limits<double>::infinity();
  if (f == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(f, &used);
  if (used != f.size()) throw std::runtime_error("read_csv: bad number '" + f + "'");
  return v;
}

double median(std::vector<double> v) {
  std::erase_if(v, [](double x) { return std::isnan(x); });
  if (v.empty()) return kNan;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double root_mean_square(const std::vector<double>& v) {
  double acc = 0.0;
  std::size_t n = 0;
  for (double x : v)
    if (!std::isnan(x)) {
      acc += x * x;
      ++n;
    }
  return n ? std::sqrt(acc / static_cast<double>(n)) : kNan;
}

}  // namespace

double noise_for_snr(std::span<const std::vector<PathParams>> per_bs_paths,
                     double snr_db) {
  double strongest = 0.0;
  for (const auto& paths : per_bs_paths)
    strongest = std::max(strongest, received_power(paths));
  return strongest / std::pow(10.0, snr_db / 10.0);
}

SweepResult sweep(const Scenario& scenario, const SweepOptions& options,
                  const RefineHook& hook) {
  if (options.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  const EstimatorConfig est_cfg = scenario.estimator_config();
  const int points = options.snr_db.empty() ? 1 : static_cast<int>(options.snr_db.size());
  const std::size_t tasks = static_cast<std::size_t>(points) * options.trials;

  std::vector<std::vector<SweepRow>> out(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks; k = next++) {
      const int point = static_cast<int>(k / options.trials);
      const int trial = static_cast<int>(k % options.trials);
      out[k] = run_trial(scenario, est_cfg, options, point, trial, hook);
    }
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tasks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  SweepResult res;
  for (auto& rows : out)
    for (auto& row : rows) {
      res.anomalies += row.anomaly;
      res.rows.push_back(row);
    }
  return res;
}

void write_csv(std::ostream& os, const SweepResult& result) {
  os << kSweepCsvHeader << '\n';
  for (const auto& r : result.rows) {
    put(os, r.snr_db);
    os << ',' << r.trial << ',' << r.bs;
    for (double v : {r.nmse_db, r.theta_err, r.r_err, r.single_err_m, r.fused_err_m,
                     r.step3_nmse_db, r.bs_snr_db, r.noise_variance}) {
      os << ',';
      put(os, v);
    }
    os << ',' << r.point << ',' << (r.anomaly ? 1 : 0) << '\n';
  }
}

SweepResult read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kSweepCsvHeader)
    throw std::runtime_error("read_csv: unexpected header");
  SweepResult res;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 13) throw std::runtime_error("read_csv: expected 13 fields: " + line);
    SweepRow r;
    r.snr_db = parse_double(f[0]);
    r.trial = std::stoi(f[1]);
    r.bs = std::stoi(f[2]);
    r.nmse_db = parse_double(f[3]);
    r.theta_err = parse_double(f[4]);
    r.r_err = parse_double(f[5]);
    r.single_err_m = parse_double(f[6]);
    r.fused_err_m = parse_double(f[7]);
    r.step3_nmse_db = parse_double(f[8]);
    r.bs_snr_db = parse_double(f[9]);
    r.noise_variance = parse_double(f[10]);
    r.point = std::stoi(f[11]);
    r.anomaly = f[12] == "1";
    res.anomalies += r.anomaly;
    res.rows.push_back(r);
  }
  return res;
}

std::vector<SweepSummary> summarize(const SweepResult& result) {
  struct Acc {
    double snr_db = 0.0;
    std::vector<double> nmse, step3, theta, r, single, fused;
  };
  std::map<std::pair<int, int>, Acc> groups;
  for (const auto& row : result.rows) {
    auto [it, inserted] = groups.try_emplace({row.point, row.bs});
    Acc& a = it->second;
    if (inserted) a.snr_db = row.snr_db;
    a.nmse.push_back(row.nmse_db);
    a.step3.push_back(row.step3_nmse_db);
    a.theta.push_back(row.theta_err);
    a.r.push_back(row.r_err);
    a.single.push_back(row.single_err_m);
    a.fused.push_back(row.fused_err_m);
  }
  std::vector<SweepSummary> out;
  for (const auto& [key, a] : groups) {
    SweepSummary s;
    s.point = key.first;
    s.bs = key.second;
    s.snr_db = a.snr_db;
    s.trials = a.nmse.size();
    s.median_nmse_db = median(a.nmse);
    s.median_step3_nmse_db = median(a.step3);
    s.theta_rmse = root_mean_square(a.theta);
    s.r_rmse = root_mean_square(a.r);
    s.single_rmse_m = root_mean_square(a.single);
    s.fused_rmse_m = root_mean_square(a.fused);
    out.push_back(s);
  }
  return out;
}

}  // namespace nearfield
