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

#include "nearfield/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nearfield/channel_model.hpp"
#include "nearfield/rng.hpp"

namespace nearfield {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

void reject_unknown(const json& j, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) fail(where.empty() ? key : where + "." + key, "unknown field");
}

double get_number(const json& j, const char* key, const std::string& field,
                  double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) fail(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(field, "must be finite");
  return x;
}

int get_int(const json& j, const char* key, const std::string& field, int fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<int>();
}

bool get_bool(const json& j, const char* key, const std::string& field, bool fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_boolean()) fail(field, "expected true or false");
  return v.get<bool>();
}

Eigen::Vector2d get_point(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(field, "expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

// First matching key among aliases, or nullptr.
const json* find_alias(const json& j, std::initializer_list<const char*> keys,
                       const char** which) {
  for (const char* k : keys)
    if (j.contains(k)) {
      *which = k;
      return &j.at(k);
    }
  return nullptr;
}

PathParams parse_path(const json& j, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
  reject_unknown(j, field, {"theta", "r", "gain", "phase"});
  for (const char* k : {"theta", "r", "gain"})
    if (!j.contains(k)) fail(field + "." + k, "missing");
  PathParams p;
  p.theta = get_number(j, "theta", field + ".theta", 0.0);
  p.r = get_number(j, "r", field + ".r", 0.0);
  p.g = get_number(j, "gain", field + ".gain", 0.0);
  p.phi = get_number(j, "phase", field + ".phase", 0.0);
  if (!(p.theta > 0.0 && p.theta < kPi)) fail(field + ".theta", "must lie in (0, pi)");
  if (!(p.g > 0.0)) fail(field + ".gain", "must be > 0");
  return p;
}

std::vector<PathParams> parse_paths(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected a list of paths");
  std::vector<PathParams> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_path(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

void check_range(const ArrayConfig& a, double r, const std::string& field) {
  if (!a.in_near_field(r)) {
    std::ostringstream os;
    os << "r = " << r << " m outside the near-field range (" << a.min_distance()
       << ", " << a.rayleigh_distance() << "]";
    fail(field, os.str());
  }
}

std::string bs_field(std::size_t i) {
  return "base_stations[" + std::to_string(i) + "]";
}

void validate(const Scenario& s) {
  if (s.bss.empty()) fail("base_stations", "at least one base station is required");
  for (std::size_t i = 0; i < s.bss.size(); ++i) {
    const auto& b = s.bss[i];
    const std::string f = bs_field(i);
    const bool explicit_paths = !b.paths.empty();
    for (std::size_t l = 0; l < b.paths.size(); ++l)
      check_range(s.array, b.paths[l].r, f + ".paths[" + std::to_string(l) + "].r");
    for (std::size_t l = 0; l < b.nlos.size(); ++l)
      check_range(s.array, b.nlos[l].r, f + ".nlos[" + std::to_string(l) + "].r");
    if (explicit_paths) continue;
    if (b.num_paths < 1) fail(f + ".num_paths", "must be >= 1");
    const bool los = b.los && s.user.has_value();
    const int nlos_slots = b.num_paths - (los ? 1 : 0);
    if (static_cast<int>(b.nlos.size()) > nlos_slots)
      fail(f + ".nlos", "more paths than num_paths allows");
    if (los) {
      const Eigen::Vector2d rel = *s.user - b.config.position;
      if (!(rel.norm() > 0.0)) fail("user", "coincides with " + f);
      const PolarPosition pp = relative_to_polar(rel, b.config.rotation);
      if (!pp.front_side) fail(f + ".rotation", "user lies behind the array");
      check_range(s.array, pp.r, f + " line-of-sight path r");
      const double g_los = los_gain(s.array.wavelength(), s.transmit_power, pp.r);
      for (std::size_t l = 0; l < b.nlos.size(); ++l)
        if (b.nlos[l].g > g_los / 3.0)
          fail(f + ".nlos[" + std::to_string(l) + "].gain",
               "exceeds one third of the line-of-sight gain");
    }
  }
  if (s.single_rounds < 0) fail("estimator.single_rounds", "must be >= 0");
  if (s.cyclic_rounds < 0) fail("estimator.cyclic_rounds", "must be >= 0");
  if (!(s.transmit_power > 0.0)) fail("transmit_power", "must be > 0");
  if (!(s.noise_variance >= 0.0)) fail("noise_variance", "must be >= 0");
  if (!(s.zeta > 0.0)) fail("zeta", "must be > 0");
  try {
    s.codebook.validate();
  } catch (const std::invalid_argument& e) {
    fail("codebook", e.what());
  }
}

}  // namespace

EstimatorConfig Scenario::estimator_config(std::shared_ptr<const Codebook> cb) const {
  EstimatorConfig cfg;
  std::size_t l = estimator_paths;
  if (l == 0)
    for (const auto& b : bss)
      l = std::max(l, b.paths.empty() ? static_cast<std::size_t>(b.num_paths)
                                      : b.paths.size());
  cfg.num_paths = std::max<std::size_t>(l, 1);
  cfg.single_rounds = single_rounds;
  cfg.cyclic_rounds = cyclic_rounds;
  cfg.refine.curvature = curvature;
  cfg.codebook = std::move(cb);
  return cfg;
}

EstimatorConfig Scenario::estimator_config() const {
  return estimator_config(std::make_shared<const Codebook>(array, codebook));
}

std::vector<BsConfig> Scenario::bs_configs() const {
  std::vector<BsConfig> out;
  for (const auto& b : bss) out.push_back(b.config);
  return out;
}

Scenario parse_scenario(const json& j) {
  if (!j.is_object()) fail("<root>", "expected a JSON object");
  reject_unknown(j, "",
                 {"schema_version", "array", "base_stations", "user", "transmit_power",
                  "noise_variance", "noise_variance_dbm", "estimator", "codebook",
                  "zeta", "seed"});
  const int version = get_int(j, "schema_version", "schema_version", kScenarioSchemaVersion);
  if (version != kScenarioSchemaVersion)
    fail("schema_version", "unsupported version " + std::to_string(version));

  Scenario s;
  if (!j.contains("array")) fail("array", "missing");
  {
    const json& a = j.at("array");
    if (!a.is_object()) fail("array", "expected an object");
    reject_unknown(a, "array", {"num_antennas", "M", "wavelength", "lambda", "spacing"});
    const char* key = nullptr;
    const json* m = find_alias(a, {"num_antennas", "M"}, &key);
    if (!m) fail("array.num_antennas", "missing");
    if (!m->is_number_integer()) fail(std::string("array.") + key, "expected an integer");
    const json* lam = find_alias(a, {"wavelength", "lambda"}, &key);
    if (!lam) fail("array.wavelength", "missing");
    if (!lam->is_number()) fail(std::string("array.") + key, "expected a number");
    const double spacing = get_number(a, "spacing", "array.spacing", 0.0);
    try {
      s.array = ArrayConfig(m->get<int>(), lam->get<double>(), spacing);
    } catch (const std::invalid_argument& e) {
      fail("array", e.what());
    }
  }

  if (j.contains("user")) s.user = get_point(j.at("user"), "user");
  s.transmit_power = get_number(j, "transmit_power", "transmit_power", 1.0);
  if (j.contains("noise_variance") && j.contains("noise_variance_dbm"))
    fail("noise_variance_dbm", "conflicts with noise_variance");
  if (j.contains("noise_variance_dbm"))
    s.noise_variance =
        1e-3 * std::pow(10.0, get_number(j, "noise_variance_dbm", "noise_variance_dbm", 0.0) / 10.0);
  else
    s.noise_variance = get_number(j, "noise_variance", "noise_variance", 1e-14);

  if (j.contains("base_stations")) {
    const json& list = j.at("base_stations");
    if (!list.is_array()) fail("base_stations", "expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const json& b = list[i];
      const std::string f = bs_field(i);
      if (!b.is_object()) fail(f, "expected an object");
      reject_unknown(b, f, {"position", "rotation", "num_paths", "los", "nlos", "paths"});
      BsSpec spec;
      spec.config.array = s.array;
      if (b.contains("position")) spec.config.position = get_point(b.at("position"), f + ".position");
      spec.config.rotation = get_number(b, "rotation", f + ".rotation", 0.0);
      spec.num_paths = get_int(b, "num_paths", f + ".num_paths", 2);
      spec.los = get_bool(b, "los", f + ".los", true);
      if (b.contains("nlos")) spec.nlos = parse_paths(b.at("nlos"), f + ".nlos");
      if (b.contains("paths")) spec.paths = parse_paths(b.at("paths"), f + ".paths");
      s.bss.push_back(std::move(spec));
    }
  } else {
    BsSpec spec;
    spec.config.array = s.array;
    spec.num_paths = 3;
    s.bss.push_back(std::move(spec));
  }

  if (j.contains("estimator")) {
    const json& e = j.at("estimator");
    if (!e.is_object()) fail("estimator", "expected an object");
    reject_unknown(e, "estimator", {"num_paths", "single_rounds", "cyclic_rounds", "curvature"});
    const int l = get_int(e, "num_paths", "estimator.num_paths", 0);
    if (l < 0) fail("estimator.num_paths", "must be >= 0");
    s.estimator_paths = static_cast<std::size_t>(l);
    s.single_rounds = get_int(e, "single_rounds", "estimator.single_rounds", 5);
    s.cyclic_rounds = get_int(e, "cyclic_rounds", "estimator.cyclic_rounds", 5);
    if (e.contains("curvature")) {
      const json& c = e.at("curvature");
      if (c == "profiled")
        s.curvature = NewtonCurvature::kProfiledGain;
      else if (c == "fixed")
        s.curvature = NewtonCurvature::kFixedGain;
      else
        fail("estimator.curvature", "expected \"profiled\" or \"fixed\"");
    }
  }
  if (j.contains("codebook")) {
    const json& c = j.at("codebook");
    if (!c.is_object()) fail("codebook", "expected an object");
    reject_unknown(c, "codebook", {"delta_alpha", "delta_beta", "cover_far_edge"});
    s.codebook.delta_alpha = get_number(c, "delta_alpha", "codebook.delta_alpha", 0.5);
    s.codebook.delta_beta = get_number(c, "delta_beta", "codebook.delta_beta", 1.0);
    s.codebook.cover_far_edge = get_bool(c, "cover_far_edge", "codebook.cover_far_edge", false);
  }
  s.zeta = get_number(j, "zeta", "zeta", kDefaultConsistencyThreshold);
  if (j.contains("seed")) {
    const json& v = j.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      fail("seed", "expected a non-negative integer");
    s.seed = v.get<std::uint64_t>();
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return parse_scenario(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

namespace {
json path_json(const PathParams& p) {
  return {{"theta", p.theta}, {"r", p.r}, {"gain", p.g}, {"phase", p.phi}};
}
}  // namespace

json scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["array"] = {{"num_antennas", s.array.num_antennas()},
                {"wavelength", s.array.wavelength()},
                {"spacing", s.array.spacing()}};
  j["base_stations"] = json::array();
  for (const auto& b : s.bss) {
    json jb = {{"position", {b.config.position.x(), b.config.position.y()}},
               {"rotation", b.config.rotation},
               {"num_paths", b.num_paths},
               {"los", b.los}};
    if (!b.nlos.empty()) {
      jb["nlos"] = json::array();
      for (const auto& p : b.nlos) jb["nlos"].push_back(path_json(p));
    }
    if (!b.paths.empty()) {
      jb["paths"] = json::array();
      for (const auto& p : b.paths) jb["paths"].push_back(path_json(p));
    }
    j["base_stations"].push_back(std::move(jb));
  }
  if (s.user) j["user"] = {s.user->x(), s.user->y()};
  j["transmit_power"] = s.transmit_power;
  j["noise_variance"] = s.noise_variance;
  j["estimator"] = {{"num_paths", s.estimator_paths},
                    {"single_rounds", s.single_rounds},
                    {"cyclic_rounds", s.cyclic_rounds},
                    {"curvature", s.curvature == NewtonCurvature::kFixedGain ? "fixed"
                                                                              : "profiled"}};
  j["codebook"] = {{"delta_alpha", s.codebook.delta_alpha},
                   {"delta_beta", s.codebook.delta_beta},
                   {"cover_far_edge", s.codebook.cover_far_edge}};
  j["zeta"] = s.zeta;
  j["seed"] = s.seed;
  return j;
}

TrialChannels draw_trial(const Scenario& s, std::uint64_t trial_seed) {
  TrialChannels out;
  const double lo = s.array.min_distance();
  const double hi = s.array.rayleigh_distance();
  for (std::size_t i = 0; i < s.bss.size(); ++i) {
    const BsSpec& b = s.bss[i];
    Rng rng(derive_seed(trial_seed, {i}));
    std::vector<PathParams> paths;
    bool has_los = false;
    if (!b.paths.empty()) {
      paths = b.paths;
    } else {
      // Reference gain for the one-third rule: the line-of-sight path, or a
      // random leading path when no user is placed.
      double g_ref;
      if (b.los && s.user) {
        const PolarPosition pp =
            relative_to_polar(*s.user - b.config.position, b.config.rotation);
        g_ref = los_gain(s.array.wavelength(), s.transmit_power, pp.r);
        paths.push_back({pp.theta, pp.r, g_ref, rng.uniform(0.0, kTwoPi)});
        has_los = true;
      } else {
        PathParams p;
        p.theta = rng.uniform(0.0, kPi);
        p.r = rng.uniform(lo, hi);
        p.g = los_gain(s.array.wavelength(), s.transmit_power, p.r);
        p.phi = rng.uniform(0.0, kTwoPi);
        g_ref = p.g;
        paths.push_back(p);
      }
      for (const auto& p : b.nlos) paths.push_back(p);
      while (static_cast<int>(paths.size()) < b.num_paths) {
        PathParams p;
        p.theta = rng.uniform(0.0, kPi);
        p.r = rng.uniform(lo, hi);
        // uniform_real_distribution draws [a, b); flip to land in (0, g/3].
        p.g = g_ref / 3.0 - rng.uniform(0.0, g_ref / 3.0);
        p.phi = rng.uniform(0.0, kTwoPi);
        if (p.theta <= 0.0 || p.r <= lo) continue;
        paths.push_back(p);
      }
    }
    out.paths.push_back(std::move(paths));
    out.has_los.push_back(has_los);
  }
  return out;
}

}  // namespace nearfield
