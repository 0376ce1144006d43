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

#include "nearfield/crlb.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace nearfield {

namespace {
constexpr double kSingularRcond = 1e-13;
}

std::array<CVector, 4> steering_derivatives(const ArrayConfig& cfg,
                                            const PathParams& p) {
  const int M = cfg.num_antennas();
  const double k = cfg.wavenumber();
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  const cplx unit_gain = std::polar(1.0, p.phi);
  const cplx j(0.0, 1.0);

  std::array<CVector, 4> out;
  for (auto& v : out) v.resize(M);
  for (int m = 0; m < M; ++m) {
    const double a = antenna_offset(cfg, m) * cfg.spacing();
    const double rm = element_distance(cfg, p.theta, p.r, m);
    const cplx base =
        unit_gain * std::polar(1.0, k * element_path_difference(cfg, p.theta, p.r, m));
    const double d_theta = -a * p.r * s / rm;
    const double d_r = (p.r + a * c) / rm - 1.0;
    out[0][m] = p.g * base * j * k * d_theta;
    out[1][m] = p.g * base * j * k * d_r;
    out[2][m] = base;
    out[3][m] = j * p.g * base;
  }
  return out;
}

FisherMatrix fim(const ArrayConfig& cfg, std::span<const PathParams> paths,
                 double noise_variance) {
  if (!(noise_variance > 0.0))
    throw std::invalid_argument("fim: noise variance must be positive");
  const auto n = static_cast<Eigen::Index>(4 * paths.size());
  Eigen::MatrixXcd jac(cfg.num_antennas(), n);
  for (std::size_t l = 0; l < paths.size(); ++l) {
    const auto d = steering_derivatives(cfg, paths[l]);
    for (int i = 0; i < 4; ++i) jac.col(static_cast<Eigen::Index>(4 * l + i)) = d[i];
  }
  FisherMatrix out;
  out.noise_variance = noise_variance;
  out.matrix = (2.0 / noise_variance) * (jac.adjoint() * jac).real();
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
  return out;
}

CrlbResult crlb_diag(const FisherMatrix& f) {
  CrlbResult out;
  const Eigen::Index n = f.matrix.rows();
  // Jacobi scaling keeps the inversion accurate when theta, r, g and phi
  // have very different information scales.
  Eigen::VectorXd scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = f.matrix(i, i);
    scale[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
  }
  const Eigen::MatrixXd scaled = scale.asDiagonal() * f.matrix * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
  const auto& values = eig.eigenvalues();
  const double max_ev = values.cwiseAbs().maxCoeff();
  const double min_ev = values.minCoeff();
  out.reciprocal_condition = max_ev > 0.0 ? std::max(min_ev, 0.0) / max_ev : 0.0;
  out.pseudo_inverse = out.reciprocal_condition < kSingularRcond;

  Eigen::MatrixXd inverse;
  if (!out.pseudo_inverse) {
    inverse = scaled.llt().solve(Eigen::MatrixXd::Identity(n, n));
  } else {
    Eigen::VectorXd inv_values(n);
    for (Eigen::Index i = 0; i < n; ++i)
      inv_values[i] = values[i] > kSingularRcond * max_ev ? 1.0 / values[i] : 0.0;
    const auto& v = eig.eigenvectors();
    inverse = v * inv_values.asDiagonal() * v.transpose();
  }
  out.variances = (scale.asDiagonal() * inverse * scale.asDiagonal()).diagonal();
  return out;
}

}  // namespace nearfield
