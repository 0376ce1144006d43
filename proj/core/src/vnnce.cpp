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

#include "nearfield/vnnce.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "nearfield/linalg.hpp"

namespace nearfield {

namespace {

constexpr double kThetaMargin = 1e-6;

// Per-element geometry of r_m(theta, r) and its partial derivatives.
struct ElementGeometry {
  double path_diff;  // r_m - r
  double d_theta;    // dr_m/dtheta
  double d_r;        // dr_m/dr
  double d_tt;
  double d_tr;
  double d_rr;
};

ElementGeometry element_geometry(const ArrayConfig& cfg, double theta, double r,
                                 int m) {
  const double a = antenna_offset(cfg, m) * cfg.spacing();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double rm = std::sqrt(r * r + a * a + 2.0 * a * r * c);
  ElementGeometry g{};
  g.path_diff = (a * a + 2.0 * a * r * c) / (rm + r);
  g.d_theta = -a * r * s / rm;
  g.d_r = (r + a * c) / rm;
  g.d_tt = -a * r * c / rm - a * a * r * r * s * s / (rm * rm * rm);
  g.d_tr = -a * s / rm + a * r * s * g.d_r / (rm * rm);
  g.d_rr = (1.0 - g.d_r * g.d_r) / rm;
  return g;
}

double default_floor(const ArrayConfig& cfg, const RefineOptions& options) {
  return options.psd_floor.value_or(1e-12 * cfg.num_antennas());
}

double clamp_theta(double theta) {
  return std::clamp(theta, kThetaMargin, kPi - kThetaMargin);
}

double clamp_distance(const ArrayConfig& cfg, double r) {
  return std::clamp(r, cfg.min_distance(), cfg.rayleigh_distance());
}

Eigen::Matrix4d coarse_covariance(const ArrayConfig& cfg,
                                  const CodebookConfig& cb, const PathParams& p,
                                  double noise_variance) {
  const double M = cfg.num_antennas();
  const double d = cfg.spacing();
  const double s = std::max(std::sin(p.theta), 1e-12);
  const double theta_cell = 2.0 * cb.delta_alpha / M / s;
  const double inv_r_cell =
      2.0 * cfg.wavelength() * cb.delta_beta / (M * M * d * d * s * s);
  const double r_cell = p.r * p.r * inv_r_cell;
  const double g_var = noise_variance / (2.0 * M);
  const double phi_var =
      p.g > 0.0 ? std::min(g_var / (p.g * p.g), kPi * kPi) : kPi * kPi;
  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
  cov.diagonal() << theta_cell * theta_cell, r_cell * r_cell, g_var, phi_var;
  return cov;
}

}  // namespace

void EstimatorConfig::validate() const {
  if (num_paths == 0)
    throw std::invalid_argument("estimator: num_paths must be >= 1");
  if (single_rounds < 0 || cyclic_rounds < 0)
    throw std::invalid_argument("estimator: rounds must be >= 0");
  if (!codebook) throw std::invalid_argument("estimator: codebook is required");
}

double objective_f(const ArrayConfig& cfg, const CVector& y,
                   const PathParams& p) {
  const int M = cfg.num_antennas();
  const double k = cfg.wavenumber();
  double f = 0.0;
  for (int m = 0; m < M; ++m) {
    const double psi =
        k * element_path_difference(cfg, p.theta, p.r, m) + p.phi - std::arg(y[m]);
    f += 2.0 * std::abs(y[m]) * p.g * std::cos(psi);
  }
  return f - M * p.g * p.g;
}

double cost(const ArrayConfig& cfg, const CVector& y, double theta, double r) {
  const cplx inner = near_steering(cfg, theta, r).dot(y);
  return std::norm(inner) / cfg.num_antennas();
}

cplx ls_gain(const ArrayConfig& cfg, const CVector& y, double theta, double r) {
  return near_steering(cfg, theta, r).dot(y) /
         static_cast<double>(cfg.num_antennas());
}

PathParams with_ls_gain(const ArrayConfig& cfg, const CVector& y, double theta,
                        double r) {
  const cplx gain = ls_gain(cfg, y, theta, r);
  return {theta, r, std::abs(gain), wrap_two_pi(std::arg(gain))};
}

Eigen::Vector4d grad_f(const ArrayConfig& cfg, const CVector& y,
                       const PathParams& p) {
  const int M = cfg.num_antennas();
  const double k = cfg.wavenumber();
  Eigen::Vector4d grad = Eigen::Vector4d::Zero();
  for (int m = 0; m < M; ++m) {
    const auto geo = element_geometry(cfg, p.theta, p.r, m);
    const double amp = 2.0 * std::abs(y[m]);
    const double psi = k * geo.path_diff + p.phi - std::arg(y[m]);
    const double sp = std::sin(psi);
    const double cp = std::cos(psi);
    grad[0] -= amp * p.g * sp * k * geo.d_theta;
    grad[1] -= amp * p.g * sp * k * (geo.d_r - 1.0);
    grad[2] += amp * cp;
    grad[3] -= amp * p.g * sp;
  }
  grad[2] -= 2.0 * M * p.g;
  return grad;
}

Eigen::Matrix4d hess_f(const ArrayConfig& cfg, const CVector& y,
                       const PathParams& p) {
  const int M = cfg.num_antennas();
  const double k = cfg.wavenumber();
  double tt = 0, tr = 0, rr = 0, tg = 0, tp = 0, rg = 0, rp = 0, gp = 0, pp = 0;
  for (int m = 0; m < M; ++m) {
    const auto geo = element_geometry(cfg, p.theta, p.r, m);
    const double amp = 2.0 * std::abs(y[m]);
    const double psi = k * geo.path_diff + p.phi - std::arg(y[m]);
    const double sp = std::sin(psi);
    const double cp = std::cos(psi);
    const double pt = k * geo.d_theta;
    const double pr = k * (geo.d_r - 1.0);
    tt -= amp * p.g * (cp * pt * pt + sp * k * geo.d_tt);
    tr -= amp * p.g * (cp * pt * pr + sp * k * geo.d_tr);
    rr -= amp * p.g * (cp * pr * pr + sp * k * geo.d_rr);
    tg -= amp * sp * pt;
    rg -= amp * sp * pr;
    tp -= amp * p.g * cp * pt;
    rp -= amp * p.g * cp * pr;
    gp -= amp * sp;
    pp -= amp * p.g * cp;
  }
  Eigen::Matrix4d h;
  // clang-format off
  h << tt, tr, tg, tp,
       tr, rr, rg, rp,
       tg, rg, -2.0 * M, gp,
       tp, rp, gp, pp;
  // clang-format on
  return h;
}

Eigen::Matrix4d soft_covariance(const ArrayConfig& cfg, const Measurement& y,
                                const PathParams& p, double psd_floor) {
  const Eigen::Matrix4d precision =
      floor_eigenvalues(Eigen::Matrix4d(-hess_f(cfg, y.y, p)), psd_floor);
  return y.noise_variance * spd_inverse(precision);
}

namespace {

// Ascent step |H|^-1 g, with |H| formed from eigenvalue moduli in
// Jacobi-scaled coordinates. Empty when the curvature carries no scale.
std::optional<Eigen::Vector2d> modulus_step(const Eigen::Matrix2d& h,
                                            const Eigen::Vector2d& g) {
  const Eigen::Vector2d scale = h.diagonal().cwiseAbs().cwiseSqrt();
  if (!(scale.minCoeff() > 0.0)) return std::nullopt;
  const Eigen::Matrix2d hs = scale.cwiseInverse().asDiagonal() * h *
                             scale.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hs);
  Eigen::Vector2d lam = es.eigenvalues().cwiseAbs();
  const double floor = 1e-8 * lam.maxCoeff();
  if (!(floor > 0.0)) return std::nullopt;
  lam = lam.cwiseMax(floor);
  const Eigen::Vector2d gs = scale.cwiseInverse().asDiagonal() * g;
  const Eigen::Vector2d ds =
      es.eigenvectors() * lam.cwiseInverse().asDiagonal() * es.eigenvectors().transpose() * gs;
  return scale.cwiseInverse().asDiagonal() * ds;
}

}  // namespace

SoftEstimate newton_refine_once(const ArrayConfig& cfg, const Measurement& y,
                                const SoftEstimate& est,
                                const RefineOptions& options,
                                RefineRecord* record) {
  // The measurement may have changed since est was produced (cyclic passes),
  // so derivatives are taken at the current least-squares gain.
  const PathParams start = with_ls_gain(cfg, y.y, est.params.theta, est.params.r);
  const double cost_before = cost(cfg, y.y, start.theta, start.r);

  const Eigen::Vector4d grad = grad_f(cfg, y.y, start);
  const Eigen::Matrix4d hess = hess_f(cfg, y.y, start);
  Eigen::Matrix2d curv = hess.topLeftCorner<2, 2>();
  if (options.curvature == NewtonCurvature::kProfiledGain) {
    const Eigen::Matrix2d cross = hess.topRightCorner<2, 2>();
    const Eigen::Matrix2d gain_block = hess.bottomRightCorner<2, 2>();
    const double gd = gain_block.determinant();
    if (gd > 0.0 && gain_block(0, 0) < 0.0)
      curv -= cross * gain_block.inverse() * cross.transpose();
  }

  double theta = start.theta;
  double r = start.r;
  bool stepped = false;
  bool accepted = false;
  const Eigen::Vector2d g2 = grad.head<2>();
  std::optional<Eigen::Vector2d> step;
  if (curv(0, 0) < 0.0 && curv.determinant() > 0.0) {
    step = -curv.inverse() * g2;
  } else if (options.safeguard == NewtonSafeguard::kBacktrack) {
    step = modulus_step(curv, g2);
  }
  if (step && step->allFinite()) {
    stepped = true;
    const int halvings =
        options.safeguard == NewtonSafeguard::kBacktrack ? options.max_halvings : 0;
    double t = 1.0;
    for (int k = 0; k <= halvings && !accepted; ++k, t *= 0.5) {
      const double theta_new = clamp_theta(theta + t * (*step)[0]);
      const double r_new = clamp_distance(cfg, r + t * (*step)[1]);
      if (!(cost_before > cost(cfg, y.y, theta_new, r_new))) {
        theta = theta_new;
        r = r_new;
        accepted = true;
      }
    }
  }

  SoftEstimate out;
  out.params = with_ls_gain(cfg, y.y, theta, r);
  out.cov = soft_covariance(cfg, y, out.params, default_floor(cfg, options));

  if (record) {
    record->params = out.params;
    record->cost_before = cost_before;
    record->cost = cost(cfg, y.y, theta, r);
    record->stepped = stepped;
    record->accepted = accepted;
  }
  return out;
}

CVector residual(const ArrayConfig& cfg, const CVector& y,
                 std::span<const SoftEstimate> fixed) {
  CVector out = y;
  for (const auto& e : fixed)
    out -= e.params.complex_gain() * near_steering(cfg, e.params.theta, e.params.r);
  return out;
}

SoftEstimate omp_detect(const Measurement& residual_measurement,
                        const Codebook& codebook) {
  const auto& cfg = codebook.array();
  const CVector inner = codebook.dictionary().adjoint() * residual_measurement.y;
  Eigen::Index best = 0;
  double best_val = std::norm(inner[0]);
  for (Eigen::Index i = 1; i < inner.size(); ++i) {
    const double v = std::norm(inner[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const auto& cw = codebook[static_cast<std::size_t>(best)];
  const cplx gain = inner[best] / static_cast<double>(cfg.num_antennas());
  SoftEstimate out;
  out.params = {cw.theta, cw.r, std::abs(gain), wrap_two_pi(std::arg(gain))};
  out.cov = coarse_covariance(cfg, codebook.config(), out.params,
                              residual_measurement.noise_variance);
  return out;
}

namespace {

CVector residual_excluding(const ArrayConfig& cfg, const CVector& y,
                           const std::vector<SoftEstimate>& estimates,
                           std::size_t skip) {
  CVector out = y;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (i == skip) continue;
    const auto& p = estimates[i].params;
    out -= p.complex_gain() * near_steering(cfg, p.theta, p.r);
  }
  return out;
}

struct Refiner {
  const ArrayConfig& array;
  const EstimatorConfig& cfg;
  const RefineHook& hook;
  std::vector<int> rounds;

  SoftEstimate run(const Measurement& y, SoftEstimate est, std::size_t path,
                   RefineStage stage) {
    if (rounds.size() <= path) rounds.resize(path + 1, 0);
    for (int s = 0; s < cfg.single_rounds; ++s) {
      RefineRecord rec;
      est = newton_refine_once(array, y, est, cfg.refine, hook ? &rec : nullptr);
      if (hook) {
        rec.path = path;
        rec.round = rounds[path];
        rec.stage = stage;
        hook(rec);
      }
      ++rounds[path];
    }
    return est;
  }

  void cyclic(const Measurement& y, std::vector<SoftEstimate>& estimates,
              std::span<const bool> frozen, RefineStage stage) {
    for (int round = 0; round < cfg.cyclic_rounds; ++round) {
      for (std::size_t k = 0; k < estimates.size(); ++k) {
        const Measurement yk{residual_excluding(array, y.y, estimates, k),
                             y.noise_variance};
        if (k < frozen.size() && frozen[k]) {
          auto& e = estimates[k];
          e.params = with_ls_gain(array, yk.y, e.params.theta, e.params.r);
          e.cov = soft_covariance(array, yk, e.params,
                                  default_floor(array, cfg.refine));
          continue;
        }
        estimates[k] = run(yk, estimates[k], k, stage);
      }
    }
  }
};

}  // namespace

std::vector<SoftEstimate> vnnce(const Measurement& y,
                                const EstimatorConfig& cfg,
                                const RefineHook& hook) {
  cfg.validate();
  const auto& array = cfg.codebook->array();
  if (y.y.size() != array.num_antennas())
    throw std::invalid_argument("vnnce: measurement length does not match array");

  Refiner refiner{array, cfg, hook, {}};
  std::vector<SoftEstimate> estimates;
  estimates.reserve(cfg.num_paths);
  for (std::size_t l = 0; l < cfg.num_paths; ++l) {
    const Measurement yr{residual(array, y.y, estimates), y.noise_variance};
    SoftEstimate coarse = omp_detect(yr, *cfg.codebook);
    if (cfg.stop_threshold) {
      const double best = cost(array, yr.y, coarse.params.theta, coarse.params.r);
      if (best < *cfg.stop_threshold * array.num_antennas() * y.noise_variance)
        break;
    }
    estimates.push_back(refiner.run(yr, coarse, l, RefineStage::kSingle));
    refiner.cyclic(y, estimates, {}, RefineStage::kCyclic);
  }
  return estimates;
}

void refine_cyclic(const ArrayConfig& array, const Measurement& y,
                   std::vector<SoftEstimate>& estimates,
                   std::span<const bool> frozen, const EstimatorConfig& cfg,
                   const RefineHook& hook) {
  Refiner refiner{array, cfg, hook, {}};
  refiner.cyclic(y, estimates, frozen, RefineStage::kAnchored);
}

OracleLsResult oracle_ls(const ArrayConfig& cfg, const CVector& y,
                         std::span<const PathParams> true_paths) {
  const auto L = static_cast<Eigen::Index>(true_paths.size());
  Eigen::MatrixXcd B(cfg.num_antennas(), L);
  for (Eigen::Index l = 0; l < L; ++l)
    B.col(l) = near_steering(cfg, true_paths[l].theta, true_paths[l].r);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(B);
  const CVector gains = cod.solve(y);
  OracleLsResult out;
  out.channel = B * gains;
  out.gains.assign(gains.data(), gains.data() + gains.size());
  out.rank_deficient = cod.rank() < L;
  return out;
}

}  // namespace nearfield
