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

#include "nearfield/channel_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nearfield/rng.hpp"

namespace nearfield {

ArrayConfig::ArrayConfig(int num_antennas, double wavelength, double spacing)
    : num_antennas_(num_antennas),
      wavelength_(wavelength),
      spacing_(spacing > 0.0 ? spacing : 0.5 * wavelength) {
  if (num_antennas < 2)
    throw std::invalid_argument("ArrayConfig: num_antennas must be >= 2, got " +
                                std::to_string(num_antennas));
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw std::invalid_argument("ArrayConfig: wavelength must be positive");
  if (spacing < 0.0 || !std::isfinite(spacing))
    throw std::invalid_argument("ArrayConfig: spacing must be positive");
}

double ArrayConfig::rayleigh_distance() const {
  const double d = aperture();
  return 2.0 * d * d / wavelength_;
}

bool ArrayConfig::in_near_field(double r) const {
  return r > min_distance() && r <= rayleigh_distance();
}

double antenna_offset(const ArrayConfig& cfg, int m) {
  return (2.0 * m - cfg.num_antennas() + 1) / 2.0;
}

std::vector<double> antenna_offsets(const ArrayConfig& cfg) {
  std::vector<double> out(static_cast<std::size_t>(cfg.num_antennas()));
  for (int m = 0; m < cfg.num_antennas(); ++m) out[m] = antenna_offset(cfg, m);
  return out;
}

double element_distance(const ArrayConfig& cfg, double theta, double r, int m) {
  const double a = antenna_offset(cfg, m) * cfg.spacing();
  return std::sqrt(r * r + a * a + 2.0 * a * r * std::cos(theta));
}

double element_path_difference(const ArrayConfig& cfg, double theta, double r,
                               int m) {
  const double a = antenna_offset(cfg, m) * cfg.spacing();
  const double rm = element_distance(cfg, theta, r, m);
  return (a * a + 2.0 * a * r * std::cos(theta)) / (rm + r);
}

CVector near_steering(const ArrayConfig& cfg, double theta, double r) {
  const int M = cfg.num_antennas();
  const double k = cfg.wavenumber();
  CVector b(M);
  for (int m = 0; m < M; ++m)
    b[m] = std::polar(1.0, k * element_path_difference(cfg, theta, r, m));
  return b;
}

CVector far_steering(const ArrayConfig& cfg, double theta) {
  const int M = cfg.num_antennas();
  const double step = cfg.wavenumber() * cfg.spacing() * std::cos(theta);
  CVector a(M);
  for (int m = 0; m < M; ++m) a[m] = std::polar(1.0, step * m);
  return a;
}

CVector synthesize_channel(const ArrayConfig& cfg,
                           std::span<const PathParams> paths) {
  CVector h = CVector::Zero(cfg.num_antennas());
  for (const auto& p : paths)
    h += p.complex_gain() * near_steering(cfg, p.theta, p.r);
  return h;
}

Measurement add_noise(const CVector& h, double noise_variance,
                      std::uint64_t seed) {
  if (noise_variance < 0.0)
    throw std::invalid_argument("add_noise: negative noise variance");
  Measurement out{h, noise_variance};
  if (noise_variance == 0.0) return out;
  Rng rng(seed);
  for (Eigen::Index m = 0; m < h.size(); ++m)
    out.y[m] += rng.complex_normal(noise_variance);
  return out;
}

double los_gain(double wavelength, double transmit_power, double r) {
  if (!(r > 0.0) || !(transmit_power > 0.0))
    throw std::invalid_argument("los_gain: r and transmit power must be > 0");
  return wavelength * std::sqrt(transmit_power) / (4.0 * kPi * r);
}

}  // namespace nearfield
