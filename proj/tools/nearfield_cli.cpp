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

// nearfield command line: estimate, sweep, crlb, codebook, validate.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nearfield/channel_model.hpp"
#include "nearfield/metrics.hpp"
#include "nearfield/report.hpp"
#include "nearfield/rng.hpp"
#include "nearfield/scenario.hpp"
#include "nearfield/sweep.hpp"
#include "nearfield/validation.hpp"

namespace {

using namespace nearfield;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<double> snr_db;
};

// Output stream for --out, stdout when empty.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw std::runtime_error("cannot write " + path);
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

Scenario load(const Common& c) {
  Scenario s = load_scenario(c.config);
  if (c.seed) s.seed = *c.seed;
  return s;
}

unsigned thread_count(unsigned flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("NEARFIELD_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw CLI::ValidationError("NEARFIELD_THREADS", "expected a positive integer");
  }
  return 0;
}

// Noise variance for a single-draw command: the scenario value, or the first
// --snr-db entry applied to the strongest BS.
double noise_for(const Scenario& s, const TrialChannels& ch, const Common& c) {
  return c.snr_db.empty() ? s.noise_variance : noise_for_snr(ch.paths, c.snr_db.front());
}

int run_estimate(const Common& c) {
  const Scenario s = load(c);
  const std::uint64_t trial_seed = derive_seed(s.seed, {0});
  const TrialChannels ch = draw_trial(s, trial_seed);
  const double sigma2 = noise_for(s, ch, c);
  std::vector<BsObservation> obs;
  for (std::size_t i = 0; i < s.bss.size(); ++i) {
    const CVector h = synthesize_channel(s.array, ch.paths[i]);
    obs.push_back({s.bss[i].config, add_noise(h, sigma2, derive_seed(trial_seed, {1, 0, i})), h});
  }
  JointOptions jo;
  jo.zeta = s.zeta;
  const JointResult jr = run_joint(obs, s.estimator_config(), jo);

  nlohmann::json j;
  j["scenario"] = scenario_to_json(s);
  j["noise_variance"] = sigma2;
  j["truth"] = nlohmann::json::array();
  for (const auto& paths : ch.paths) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& p : paths) list.push_back(to_json(p));
    j["truth"].push_back(std::move(list));
  }
  j["result"] = to_json(jr);
  if (s.user)
    j["fused_error_m"] = (jr.step2.fused.mean - *s.user).norm();
  Sink sink(c.out);
  sink.get() << j.dump(2) << '\n';
  return kExitOk;
}

int run_sweep(const Common& c, int trials, unsigned threads) {
  const Scenario s = load(c);
  SweepOptions opt;
  opt.snr_db = c.snr_db;
  opt.trials = trials;
  opt.threads = thread_count(threads);
  const SweepResult res = sweep(s, opt);
  Sink sink(c.out);
  write_csv(sink.get(), res);
  if (res.anomalies) {
    std::cerr << "nearfield: " << res.anomalies << " rows flagged as anomalies\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int run_crlb(const Common& c) {
  const Scenario s = load(c);
  const TrialChannels ch = draw_trial(s, derive_seed(s.seed, {0}));
  const double sigma2 = noise_for(s, ch, c);
  if (!(sigma2 > 0.0)) throw ConfigError("noise_variance: the CRLB needs sigma^2 > 0");
  Sink sink(c.out);
  write_crlb_csv(sink.get(), crlb_table(s, ch, sigma2));
  return kExitOk;
}

int run_codebook(const Common& c) {
  const Scenario s = load(c);
  const Codebook cb(s.array, s.codebook);
  Sink sink(c.out);
  write_codebook_csv(sink.get(), cb);
  std::size_t lo = cb.size(), hi = 0, run = 0;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    ++run;
    if (i + 1 == cb.size() || cb[i + 1].n_theta != cb[i].n_theta) {
      lo = std::min(lo, run);
      hi = std::max(hi, run);
      run = 0;
    }
  }
  std::cerr << "codewords " << cb.size() << ", angles " << cb.angle_count()
            << ", distances per angle " << lo << ".." << hi << '\n';
  return kExitOk;
}

int run_validate(const Common& c) {
  const Scenario s = load(c);
  bool all = true;
  Sink sink(c.out);
  for (const auto& r : validate_invariants(s)) {
    sink.get() << (r.pass ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) sink.get() << " (" << r.detail << ')';
    sink.get() << '\n';
    all &= r.pass;
  }
  return all ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field channel estimation and cooperative localization"};
  app.require_subcommand(1);

  Common common;
  int trials = 200;
  unsigned threads = 0;

  auto add_common = [&](CLI::App* sub, bool with_snr) {
    sub->add_option("--config", common.config, "Scenario JSON")->required();
    sub->add_option("--seed", common.seed, "Override the scenario seed");
    sub->add_option("--out", common.out, "Output file (default stdout)");
    if (with_snr)
      sub->add_option("--snr-db", common.snr_db, "Received SNR of the strongest BS (dB)")
          ->delimiter(',');
  };

  CLI::App* estimate = app.add_subcommand("estimate", "One draw, full joint result as JSON");
  add_common(estimate, true);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep to CSV");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--trials", trials, "Trials per grid point")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--threads", threads,
                        "Worker threads (default NEARFIELD_THREADS or all cores)");
  CLI::App* crlb_cmd = app.add_subcommand("crlb", "CRLB table for one draw");
  add_common(crlb_cmd, true);
  CLI::App* codebook_cmd = app.add_subcommand("codebook", "Dump the codebook as CSV");
  add_common(codebook_cmd, false);
  CLI::App* validate_cmd = app.add_subcommand("validate", "Run the invariant suite");
  add_common(validate_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (estimate->parsed()) return run_estimate(common);
    if (sweep_cmd->parsed()) return run_sweep(common, trials, threads);
    if (crlb_cmd->parsed()) return run_crlb(common);
    if (codebook_cmd->parsed()) return run_codebook(common);
    if (validate_cmd->parsed()) return run_validate(common);
  } catch (const ConfigError& e) {
    std::cerr << "nearfield: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "nearfield: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "nearfield: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
