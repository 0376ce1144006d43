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

#include <array>
#include <span>

#include <Eigen/Core>

#include "nearfield/channel_model.hpp"

namespace nearfield {

/// Derivatives of g exp(j phi) b(theta, r) with respect to theta, r, g, phi.
std::array<CVector, 4> steering_derivatives(const ArrayConfig& cfg,
                                            const PathParams& p);

/// Fisher information over (theta_1, r_1, g_1, phi_1, ..., phi_L).
struct FisherMatrix {
  Eigen::MatrixXd matrix;
  double noise_variance = 0.0;
};

/// F_ij = (2 / sigma^2) Re{ (ds/dmu_i)^H ds/dmu_j }, all inter-path blocks
/// included. Throws std::invalid_argument if sigma^2 <= 0.
FisherMatrix fim(const ArrayConfig& cfg, std::span<const PathParams> paths,
                 double noise_variance);

struct CrlbResult {
  Eigen::VectorXd variances;
  /// Set when F was numerically singular and a pseudo-inverse was used.
  bool pseudo_inverse = false;
  double reciprocal_condition = 0.0;
};

/// Diagonal of F^{-1}.
CrlbResult crlb_diag(const FisherMatrix& f);

}  // namespace nearfield
