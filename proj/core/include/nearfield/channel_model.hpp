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
#include <span>
#include <vector>

#include "nearfield/types.hpp"

namespace nearfield {

/// Uniform linear array. Spacing defaults to half a wavelength.
class ArrayConfig {
 public:
  /// Throws std::invalid_argument on M < 2, non-positive wavelength or spacing.
  ArrayConfig(int num_antennas, double wavelength, double spacing = 0.0);

  int num_antennas() const { return num_antennas_; }
  double wavelength() const { return wavelength_; }
  double spacing() const { return spacing_; }
  double aperture() const { return num_antennas_ * spacing_; }
  double rayleigh_distance() const;
  double wavenumber() const { return kTwoPi / wavelength_; }
  /// Lower end of the near-field annulus, 1.2 D.
  double min_distance() const { return 1.2 * aperture(); }
  /// True when r lies in (1.2 D, r_R].
  bool in_near_field(double r) const;

 private:
  int num_antennas_;
  double wavelength_;
  double spacing_;
};

struct Measurement {
  CVector y;
  double noise_variance = 0.0;
};

/// delta_m = (2m - M + 1) / 2 for m = 0..M-1.
std::vector<double> antenna_offsets(const ArrayConfig& cfg);
double antenna_offset(const ArrayConfig& cfg, int m);

/// Distance from antenna m to a source at (theta, r).
double element_distance(const ArrayConfig& cfg, double theta, double r, int m);

/// r_m - r, evaluated without cancellation for r much larger than the aperture.
double element_path_difference(const ArrayConfig& cfg, double theta, double r,
                               int m);

/// Spherical-wave steering vector, entry m = exp(j k (r_m - r)).
CVector near_steering(const ArrayConfig& cfg, double theta, double r);

/// Planar-wave steering vector, entry m = exp(j k d m cos(theta)).
CVector far_steering(const ArrayConfig& cfg, double theta);

/// h = sum_l g_l exp(j phi_l) b(theta_l, r_l).
CVector synthesize_channel(const ArrayConfig& cfg,
                           std::span<const PathParams> paths);

/// y = h + n with n ~ CN(0, sigma2 I). Deterministic in seed.
Measurement add_noise(const CVector& h, double noise_variance,
                      std::uint64_t seed);

/// Free-space line-of-sight gain lambda sqrt(p_t) / (4 pi r).
double los_gain(double wavelength, double transmit_power, double r);

}  // namespace nearfield
