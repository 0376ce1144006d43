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

#include <cstddef>
#include <vector>

#include "nearfield/channel_model.hpp"

namespace nearfield {

struct Codeword {
  double theta = 0.0;
  double r = 0.0;
  double cos_theta = 0.0;
  int n_theta = 0;
  /// Distance grid index; 0 marks the Rayleigh-distance codeword.
  int n_r = 0;
};

struct CodebookConfig {
  double delta_alpha = 0.5;
  double delta_beta = 1.0;
  /// Append (theta, r_R) to every angle that does not already end there.
  bool cover_far_edge = false;

  /// Throws std::invalid_argument unless 0 < delta_alpha <= 0.9 and
  /// 0 < delta_beta < 2.98.
  void validate() const;
};

struct AngleSample {
  int n = 0;
  double cos_theta = 0.0;
};

struct DistanceSample {
  int n = 0;
  double r = 0.0;
};

/// cos(theta_n) = (2 n da - M + 1) / M for n = 0 .. floor(M / da) - 1,
/// keeping only |cos| < 1.
std::vector<AngleSample> angle_grid(const ArrayConfig& cfg, double delta_alpha);

/// 1 / r_n = 2 n lambda db / (M^2 d^2 sin^2 theta), n = 1, 2, ..., restricted
/// to (1.2 D, r_R]. When no r_n falls in that range the single sample
/// (n = 0, r_R) is returned.
std::vector<DistanceSample> distance_grid(const ArrayConfig& cfg, double theta,
                                          double delta_beta);

/// Normalised angle offset alpha = M (cos theta - cos theta_t) / 2.
double alpha_offset(const ArrayConfig& cfg, double cos_theta,
                    double cos_theta_true);

/// Normalised distance offset
/// beta = M^2 d^2 sin^2 theta / (2 lambda) (1 / r - 1 / r_t).
double beta_offset(const ArrayConfig& cfg, double theta, double r,
                   double r_true);

/// Immutable angle-distance codebook with its steering dictionary.
class Codebook {
 public:
  Codebook(const ArrayConfig& array, const CodebookConfig& config);

  const ArrayConfig& array() const { return array_; }
  const CodebookConfig& config() const { return config_; }
  std::size_t size() const { return codewords_.size(); }
  const Codeword& operator[](std::size_t i) const { return codewords_[i]; }
  const std::vector<Codeword>& codewords() const { return codewords_; }
  std::size_t angle_count() const { return angle_count_; }

  /// M x N matrix whose column i is near_steering(codeword i).
  const Eigen::MatrixXcd& dictionary() const { return dictionary_; }

 private:
  ArrayConfig array_;
  CodebookConfig config_;
  std::vector<Codeword> codewords_;
  std::size_t angle_count_ = 0;
  Eigen::MatrixXcd dictionary_;
};

/// Ordered by ascending n_theta, then ascending distance index.
Codebook build_codebook(const ArrayConfig& array, const CodebookConfig& config);

}  // namespace nearfield
