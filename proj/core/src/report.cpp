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

#include "nearfield/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "nearfield/crlb.hpp"

namespace nearfield {
namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json to_json(const PathParams& p) {
  return {{"theta", p.theta}, {"r", p.r}, {"gain", p.g}, {"phase", p.phi}};
}

json to_json(const SoftEstimate& e) {
  return {{"params", to_json(e.params)}, {"cov", matrix_json(e.cov)}};
}

json to_json(const SoftPosition& p) {
  return {{"mean", {p.mean.x(), p.mean.y()}},
          {"cov", matrix_json(p.cov)},
          {"repaired", p.repaired}};
}

json to_json(const FusionReport& r) {
  json inputs = json::array();
  for (const auto& e : r.inputs)
    inputs.push_back({{"bs", e.bs},
                      {"path", e.path},
                      {"position", to_json(e.position)},
                      {"cost", e.cost},
                      {"eta", e.eta},
                      {"distance2", e.distance2},
                      {"rear_side_rejected", e.rear_side_rejected}});
  return {{"fused", to_json(r.fused)},
          {"inputs", std::move(inputs)},
          {"reference", r.reference},
          {"degenerate", r.degenerate}};
}

json to_json(const JointResult& r) {
  json per_bs = json::array();
  for (const auto& b : r.per_bs) {
    json jb;
    jb["step1"] = json::array();
    for (const auto& e : b.step1) jb["step1"].push_back(to_json(e));
    jb["step3"] = json::array();
    for (const auto& e : b.step3) jb["step3"].push_back(to_json(e));
    jb["anchored"] = b.anchored;
    jb["anchor_path"] = b.anchor_path ? json(*b.anchor_path) : json(nullptr);
    jb["nmse_before"] = b.nmse_before ? json(*b.nmse_before) : json(nullptr);
    jb["nmse_after"] = b.nmse_after ? json(*b.nmse_after) : json(nullptr);
    per_bs.push_back(std::move(jb));
  }
  return {{"per_bs", std::move(per_bs)},
          {"step2", to_json(r.step2)},
          {"step3_skipped", r.step3_skipped}};
}

std::vector<CrlbRow> crlb_table(const Scenario& s, const TrialChannels& ch,
                                double noise_variance) {
  static constexpr const char* kNames[4] = {"theta", "r", "g", "phi"};
  std::vector<CrlbRow> out;
  const bool plain = ch.paths.size() == 1 && ch.paths[0].size() == 1;
  for (std::size_t i = 0; i < ch.paths.size(); ++i) {
    const CrlbResult c = crlb_diag(fim(s.array, ch.paths[i], noise_variance));
    for (Eigen::Index k = 0; k < c.variances.size(); ++k) {
      const std::size_t l = static_cast<std::size_t>(k) / 4;
      std::string name = kNames[k % 4];
      if (!plain) name = "bs" + std::to_string(i) + "." + name + "_" + std::to_string(l);
      out.push_back({std::move(name), c.variances[k]});
    }
  }
  return out;
}

void write_crlb_csv(std::ostream& os, const std::vector<CrlbRow>& rows) {
  os << "param,crlb,sqrt_crlb\n";
  for (const auto& r : rows)
    os << r.param << ',' << num(r.crlb) << ',' << num(std::sqrt(r.crlb)) << '\n';
}

void write_codebook_csv(std::ostream& os, const Codebook& cb) {
  os << "index,n_theta,n_r,theta,r,cos_theta\n";
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const Codeword& c = cb[i];
    os << i << ',' << c.n_theta << ',' << c.n_r << ',' << num(c.theta) << ','
       << num(c.r) << ',' << num(c.cos_theta) << '\n';
  }
}

}  // namespace nearfield
