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

#include "nearfield/codebook.hpp"

#include <cmath>
#include <stdexcept>

namespace nearfield {

void CodebookConfig::validate() const {
  if (!(delta_alpha > 0.0 && delta_alpha <= 0.9))
    throw std::invalid_argument("codebook: delta_alpha must be in (0, 0.9]");
  if (!(delta_beta > 0.0 && delta_beta < 2.98))
    throw std::invalid_argument("codebook: delta_beta must be in (0, 2.98)");
}

std::vector<AngleSample> angle_grid(const ArrayConfig& cfg,
                                    double delta_alpha) {
  const int M = cfg.num_antennas();
  const auto count = static_cast<int>(std::floor(M / delta_alpha));
  std::vector<AngleSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    const double c = (2.0 * n * delta_alpha - M + 1.0) / M;
    if (std::abs(c) < 1.0) out.push_back({n, c});
  }
  return out;
}

std::vector<DistanceSample> distance_grid(const ArrayConfig& cfg, double theta,
                                          double delta_beta) {
  const double M = cfg.num_antennas();
  const double d = cfg.spacing();
  const double sin_t = std::sin(theta);
  const double step = 2.0 * cfg.wavelength() * delta_beta / (M * M * d * d * sin_t * sin_t);
  const double r_max = cfg.rayleigh_distance();
  const double r_min = cfg.min_distance();

  std::vector<DistanceSample> out;
  if (std::isfinite(step) && step > 0.0) {
    for (int n = 1;; ++n) {
      const double r = 1.0 / (n * step);
      if (r <= r_min) break;
      if (r <= r_max) out.push_back({n, r});
    }
  }
  if (out.empty()) out.push_back({0, r_max});
  return out;
}

double alpha_offset(const ArrayConfig& cfg, double cos_theta,
                    double cos_theta_true) {
  return 0.5 * cfg.num_antennas() * (cos_theta - cos_theta_true);
}

double beta_offset(const ArrayConfig& cfg, double theta, double r,
                   double r_true) {
  const double M = cfg.num_antennas();
  const double d = cfg.spacing();
  const double s = std::sin(theta);
  return M * M * d * d * s * s / (2.0 * cfg.wavelength()) * (1.0 / r - 1.0 / r_true);
}

Codebook::Codebook(const ArrayConfig& array, const CodebookConfig& config)
    : array_(array), config_(config) {
  config_.validate();
  const double r_max = array_.rayleigh_distance();
  for (const auto& a : angle_grid(array_, config_.delta_alpha)) {
    const double theta = std::acos(a.cos_theta);
    const auto distances = distance_grid(array_, theta, config_.delta_beta);
    for (const auto& d : distances)
      codewords_.push_back({theta, d.r, a.cos_theta, a.n, d.n});
    if (config_.cover_far_edge && distances.front().r < r_max)
      codewords_.insert(codewords_.end() - static_cast<long>(distances.size()),
                        {theta, r_max, a.cos_theta, a.n, 0});
    ++angle_count_;
  }
  if (codewords_.empty())
    throw std::invalid_argument("codebook: grids are degenerate, no codewords");

  const int M = array_.num_antennas();
  dictionary_.resize(M, static_cast<Eigen::Index>(codewords_.size()));
  for (std::size_t i = 0; i < codewords_.size(); ++i)
    dictionary_.col(static_cast<Eigen::Index>(i)) =
        near_steering(array_, codewords_[i].theta, codewords_[i].r);
}

Codebook build_codebook(const ArrayConfig& array, const CodebookConfig& config) {
  return Codebook(array, config);
}

}  // namespace nearfield
