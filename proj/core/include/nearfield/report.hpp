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

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nearfield/codebook.hpp"
#include "nearfield/pipeline.hpp"
#include "nearfield/scenario.hpp"

namespace nearfield {

nlohmann::json to_json(const PathParams& p);
nlohmann::json to_json(const SoftEstimate& e);
nlohmann::json to_json(const SoftPosition& p);
nlohmann::json to_json(const FusionReport& r);
nlohmann::json to_json(const JointResult& r);

struct CrlbRow {
  std::string param;
  double crlb = 0.0;
};

/// CRLB of every path parameter of every BS for the given trial channels.
/// Names are theta/r/g/phi for a single path at a single BS and
/// bs<i>.<name>_<l> otherwise.
std::vector<CrlbRow> crlb_table(const Scenario& s, const TrialChannels& ch,
                                double noise_variance);
void write_crlb_csv(std::ostream& os, const std::vector<CrlbRow>& rows);

/// index,n_theta,n_r,theta,r,cos_theta
void write_codebook_csv(std::ostream& os, const Codebook& cb);

}  // namespace nearfield
