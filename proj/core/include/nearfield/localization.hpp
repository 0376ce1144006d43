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
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "nearfield/channel_model.hpp"
#include "nearfield/vnnce.hpp"

namespace nearfield {

struct BsConfig {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  /// Angle from the positive x axis to the array axis (rad).
  double rotation = 0.0;
  ArrayConfig array{2, 1.0};
};

/// Gaussian position belief, mean in meters and 2x2 covariance in m^2.
struct SoftPosition {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
  /// The covariance needed eigenvalue repair.
  bool repaired = false;
};

struct PolarPosition {
  double theta = 0.0;
  double r = 0.0;
  /// theta lies in (0, pi), the half-plane the array observes.
  bool front_side = true;
};

/// r (cos(theta + omega), sin(theta + omega)).
Eigen::Vector2d polar_to_relative(double theta, double r, double omega);

/// Inverse of polar_to_relative; theta is returned in (-pi, pi] and flagged
/// when outside (0, pi). Throws std::invalid_argument at the origin.
PolarPosition relative_to_polar(const Eigen::Vector2d& rel, double omega);

/// First and second derivatives of (theta, r) with respect to (x_r, y_r).
/// They do not depend on the array rotation.
struct PolarDerivatives {
  /// Row 0: (dtheta/dx, dtheta/dy); row 1: (dr/dx, dr/dy).
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d theta_hessian;
  Eigen::Matrix2d r_hessian;
};

PolarDerivatives polar_derivatives(const Eigen::Vector2d& rel);

enum class PositionCovarianceMode {
  /// Chain rule on the Hessian of G_y (gain eliminated by least squares).
  kProfiledGain,
  /// Chain rule on the (theta, r) block of the Hessian of f, gain held fixed.
  kFixedGain,
  /// J V J^T from the (theta, r) block of the estimate covariance; does not
  /// use the measurement.
  kJacobian,
};

/// Hessian of the objective in relative Cartesian coordinates, obtained by
/// the second-order chain rule from the polar derivatives.
Eigen::Matrix2d position_hessian(const ArrayConfig& cfg, const CVector& y,
                                 const PathParams& p, double omega,
                                 PositionCovarianceMode mode);

inline constexpr double kPositionCovarianceFloor = 1e-12;

/// Soft relative position of one path. y is the measurement the path was
/// refined against (its residual in the multipath case).
SoftPosition position_covariance(
    const ArrayConfig& cfg, const Measurement& y, const SoftEstimate& est,
    double omega,
    PositionCovarianceMode mode = PositionCovarianceMode::kProfiledGain);

/// Translates a relative position by the BS position.
SoftPosition to_global(const SoftPosition& rel, const BsConfig& bs);

/// Product of Gaussians in information form. Throws std::invalid_argument
/// when an input covariance is not positive definite or the list is empty.
SoftPosition gaussian_fuse(std::span<const SoftPosition> inputs);

struct ConsistencyResult {
  bool consistent = false;
  /// V_a + V_b was singular; the pair is reported inconsistent.
  bool singular = false;
  double distance2 = 0.0;
};

ConsistencyResult consistency_test(const SoftPosition& a, const SoftPosition& b,
                                   double zeta);

/// 1 when (m_a - m_b)^T (V_a + V_b)^{-1} (m_a - m_b) < zeta^2.
int consistency(const SoftPosition& a, const SoftPosition& b, double zeta);

inline constexpr double kDefaultConsistencyThreshold = 3.5;

struct BsFusionEntry {
  std::size_t bs = 0;
  std::size_t path = 0;
  SoftPosition position;  ///< global frame
  double cost = 0.0;      ///< tr(V)
  int eta = 0;
  double distance2 = 0.0;
  std::size_t rear_side_rejected = 0;
};

struct FusionReport {
  SoftPosition fused;
  /// One entry per BS that produced a candidate, in BS order.
  std::vector<BsFusionEntry> inputs;
  std::size_t reference = 0;  ///< BS index of the reference position
  /// Only the reference passed gating although other BSs were available.
  bool degenerate = false;
};

/// Least-cost position per BS, ascending-cost association against the
/// reference, and Gaussian fusion of the consistent set. Throws
/// std::invalid_argument when no BS has a usable path.
FusionReport gfcl(std::span<const std::vector<SoftEstimate>> per_bs_estimates,
                  std::span<const BsConfig> bss,
                  std::span<const Measurement> measurements,
                  double zeta = kDefaultConsistencyThreshold,
                  PositionCovarianceMode mode = PositionCovarianceMode::kProfiledGain);

}  // namespace nearfield
