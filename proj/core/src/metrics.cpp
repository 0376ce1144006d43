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

#include "nearfield/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nearfield {

double nmse(const CVector& h_true, const CVector& h_est) {
  if (h_true.size() != h_est.size())
    throw std::invalid_argument("nmse: length mismatch");
  const double energy = h_true.squaredNorm();
  if (!(energy > 0.0)) throw std::invalid_argument("nmse: zero true channel");
  return (h_true - h_est).squaredNorm() / energy;
}

double to_db(double ratio) {
  if (ratio <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(ratio);
}

double rmse(std::span<const double> errors) {
  if (errors.empty()) throw std::invalid_argument("rmse: no samples");
  double acc = 0.0;
  for (double e : errors) acc += e * e;
  return std::sqrt(acc / static_cast<double>(errors.size()));
}

double rmse(std::span<const Eigen::Vector2d> errors) {
  if (errors.empty()) throw std::invalid_argument("rmse: no samples");
  double acc = 0.0;
  for (const auto& e : errors) acc += e.squaredNorm();
  return std::sqrt(acc / static_cast<double>(errors.size()));
}

double to_dbmeter(double rmse_m) {
  if (rmse_m <= 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(rmse_m);
}

}  // namespace nearfield
