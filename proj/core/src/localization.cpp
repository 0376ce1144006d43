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

#include "nearfield/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace nearfield {

Eigen::Vector2d polar_to_relative(double theta, double r, double omega) {
  return {r * std::cos(theta + omega), r * std::sin(theta + omega)};
}

PolarPosition relative_to_polar(const Eigen::Vector2d& rel, double omega) {
  const double r = rel.norm();
  if (!(r > 0.0))
    throw std::invalid_argument("relative_to_polar: position at the array origin");
  // Rotate into the array frame, where the array axis is the local x axis.
  const double along = rel.x() * std::cos(omega) + rel.y() * std::sin(omega);
  const double across = rel.y() * std::cos(omega) - rel.x() * std::sin(omega);
  PolarPosition out;
  out.r = r;
  out.theta = std::atan2(across, along);
  out.front_side = out.theta > 0.0 && out.theta < kPi;
  return out;
}

PolarDerivatives polar_derivatives(const Eigen::Vector2d& rel) {
  const double x = rel.x();
  const double y = rel.y();
  const double rho2 = x * x + y * y;
  const double rho = std::sqrt(rho2);
  const double rho3 = rho2 * rho;
  const double rho4 = rho2 * rho2;
  PolarDerivatives d;
  d.jacobian << -y / rho2, x / rho2, x / rho, y / rho;
  d.theta_hessian << 2.0 * x * y / rho4, (y * y - x * x) / rho4,
      (y * y - x * x) / rho4, -2.0 * x * y / rho4;
  d.r_hessian << y * y / rho3, -x * y / rho3, -x * y / rho3, x * x / rho3;
  return d;
}

Eigen::Matrix2d position_hessian(const ArrayConfig& cfg, const CVector& y,
                                 const PathParams& p, double omega,
                                 PositionCovarianceMode mode) {
  PathParams at = p;
  if (mode == PositionCovarianceMode::kProfiledGain)
    at = with_ls_gain(cfg, y, p.theta, p.r);
  const Eigen::Vector4d grad = grad_f(cfg, y, at);
  const Eigen::Matrix4d hess = hess_f(cfg, y, at);
  Eigen::Matrix2d polar_hess = hess.topLeftCorner<2, 2>();
  if (mode == PositionCovarianceMode::kProfiledGain) {
    const Eigen::Matrix2d gain_block = hess.bottomRightCorner<2, 2>();
    if (gain_block(0, 0) < 0.0 && gain_block.determinant() > 0.0) {
      const Eigen::Matrix2d cross = hess.topRightCorner<2, 2>();
      polar_hess -= cross * gain_block.inverse() * cross.transpose();
    }
  }
  const auto d = polar_derivatives(polar_to_relative(at.theta, at.r, omega));
  Eigen::Matrix2d out = d.jacobian.transpose() * polar_hess * d.jacobian +
                        grad[0] * d.theta_hessian + grad[1] * d.r_hessian;
  return 0.5 * (out + out.transpose());
}

namespace {

// Covariance sigma^2 (-H)^{-1}. Directions without curvature get a variance
// on the scale of the whole near-field region.
Eigen::Matrix2d covariance_from_hessian(const Eigen::Matrix2d& hess,
                                        double noise_variance,
                                        double uninformative, bool* repaired) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(-hess);
  Eigen::Vector2d var;
  *repaired = false;
  for (int i = 0; i < 2; ++i) {
    const double lambda = eig.eigenvalues()[i];
    double v = lambda > 0.0 ? noise_variance / lambda : uninformative;
    if (!(lambda > 0.0)) *repaired = true;
    if (!(v >= kPositionCovarianceFloor)) {
      v = kPositionCovarianceFloor;
      *repaired = true;
    }
    var[i] = v;
  }
  const auto& vec = eig.eigenvectors();
  Eigen::Matrix2d cov = vec * var.asDiagonal() * vec.transpose();
  return 0.5 * (cov + cov.transpose());
}

}  // namespace

SoftPosition position_covariance(const ArrayConfig& cfg, const Measurement& y,
                                 const SoftEstimate& est, double omega,
                                 PositionCovarianceMode mode) {
  const auto& p = est.params;
  SoftPosition out;
  out.mean = polar_to_relative(p.theta, p.r, omega);
  if (mode == PositionCovarianceMode::kJacobian) {
    const double a = p.theta + omega;
    Eigen::Matrix2d jac;
    jac << -p.r * std::sin(a), std::cos(a), p.r * std::cos(a), std::sin(a);
    const Eigen::Matrix2d cov = jac * est.cov.topLeftCorner<2, 2>() * jac.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(0.5 * (cov + cov.transpose()));
    Eigen::Vector2d var = eig.eigenvalues();
    for (int i = 0; i < 2; ++i) {
      if (!(var[i] >= kPositionCovarianceFloor)) {
        var[i] = kPositionCovarianceFloor;
        out.repaired = true;
      }
    }
    out.cov = eig.eigenvectors() * var.asDiagonal() * eig.eigenvectors().transpose();
    return out;
  }
  const double r_max = cfg.rayleigh_distance();
  out.cov = covariance_from_hessian(position_hessian(cfg, y.y, p, omega, mode),
                                    y.noise_variance, r_max * r_max,
                                    &out.repaired);
  return out;
}

SoftPosition to_global(const SoftPosition& rel, const BsConfig& bs) {
  SoftPosition out = rel;
  out.mean += bs.position;
  return out;
}

SoftPosition gaussian_fuse(std::span<const SoftPosition> inputs) {
  if (inputs.empty())
    throw std::invalid_argument("gaussian_fuse: no inputs");
  Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
  Eigen::Vector2d info_mean = Eigen::Vector2d::Zero();
  for (const auto& in : inputs) {
    Eigen::LLT<Eigen::Matrix2d> llt(in.cov);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument(
          "gaussian_fuse: input covariance is not positive definite");
    const Eigen::Matrix2d inv = llt.solve(Eigen::Matrix2d::Identity());
    info += inv;
    info_mean += inv * in.mean;
  }
  // A single input passes through without a round trip through its inverse.
  if (inputs.size() == 1) return inputs.front();
  SoftPosition out;
  out.cov = info.inverse();
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  out.mean = out.cov * info_mean;
  return out;
}

ConsistencyResult consistency_test(const SoftPosition& a, const SoftPosition& b,
                                   double zeta) {
  ConsistencyResult out;
  const Eigen::Matrix2d sum = a.cov + b.cov;
  Eigen::LLT<Eigen::Matrix2d> llt(sum);
  if (llt.info() != Eigen::Success || !(sum.determinant() > 0.0)) {
    out.singular = true;
    return out;
  }
  const Eigen::Vector2d diff = a.mean - b.mean;
  out.distance2 = diff.dot(llt.solve(diff));
  out.consistent = out.distance2 < zeta * zeta;
  return out;
}

int consistency(const SoftPosition& a, const SoftPosition& b, double zeta) {
  return consistency_test(a, b, zeta).consistent ? 1 : 0;
}

FusionReport gfcl(std::span<const std::vector<SoftEstimate>> per_bs_estimates,
                  std::span<const BsConfig> bss,
                  std::span<const Measurement> measurements, double zeta,
                  PositionCovarianceMode mode) {
  if (per_bs_estimates.size() != bss.size() ||
      measurements.size() != bss.size())
    throw std::invalid_argument("gfcl: per-BS inputs have mismatched lengths");

  FusionReport report;
  for (std::size_t i = 0; i < bss.size(); ++i) {
    const auto& estimates = per_bs_estimates[i];
    const auto& array = bss[i].array;
    std::optional<BsFusionEntry> best;
    std::size_t rejected = 0;
    for (std::size_t l = 0; l < estimates.size(); ++l) {
      const auto& p = estimates[l].params;
      if (!(p.theta > 0.0 && p.theta < kPi)) {
        ++rejected;
        continue;
      }
      std::vector<SoftEstimate> others;
      for (std::size_t k = 0; k < estimates.size(); ++k)
        if (k != l) others.push_back(estimates[k]);
      const Measurement yl{residual(array, measurements[i].y, others),
                           measurements[i].noise_variance};
      const auto rel =
          position_covariance(array, yl, estimates[l], bss[i].rotation, mode);
      const double c = rel.cov.trace();
      if (!best || c < best->cost) {
        best = BsFusionEntry{};
        best->bs = i;
        best->path = l;
        best->position = to_global(rel, bss[i]);
        best->cost = c;
      }
    }
    if (best) {
      best->rear_side_rejected = rejected;
      report.inputs.push_back(*best);
    }
  }
  if (report.inputs.empty())
    throw std::invalid_argument("gfcl: no base station produced a candidate");

  std::vector<std::size_t> order(report.inputs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.inputs[a].cost < report.inputs[b].cost;
  });

  auto& ref = report.inputs[order.front()];
  ref.eta = 1;
  report.reference = ref.bs;
  std::vector<SoftPosition> accepted{ref.position};
  for (std::size_t k = 1; k < order.size(); ++k) {
    auto& entry = report.inputs[order[k]];
    const auto c = consistency_test(ref.position, entry.position, zeta);
    entry.eta = c.consistent ? 1 : 0;
    entry.distance2 = c.distance2;
    if (entry.eta) accepted.push_back(entry.position);
  }
  report.degenerate = report.inputs.size() > 1 && accepted.size() == 1;
  report.fused = gaussian_fuse(accepted);
  return report;
}

}  // namespace nearfield
