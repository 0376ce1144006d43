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
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "nearfield/channel_model.hpp"
#include "nearfield/codebook.hpp"

namespace nearfield {

/// Path estimate with its confidence covariance, ordered (theta, r, g, phi).
struct SoftEstimate {
  PathParams params;
  Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();
};

/// Curvature used for the (theta, r) Newton step.
enum class NewtonCurvature {
  /// The (theta, r) block of the Hessian of f with the gain held fixed.
  kFixedGain,
  /// The same block after eliminating (g, phi): the Hessian of G_y(theta, r)
  /// at the least-squares gain.
  kProfiledGain,
};

enum class NewtonSafeguard {
  /// Step only when the (theta, r) curvature is negative definite; revert a
  /// step that lowers the cost.
  kNone,
  /// Use |H| (eigenvalue moduli in Jacobi-scaled coordinates) when the
  /// curvature is not negative definite and halve a step that lowers the
  /// cost, up to max_halvings times.
  kBacktrack,
};

struct RefineOptions {
  NewtonCurvature curvature = NewtonCurvature::kProfiledGain;
  NewtonSafeguard safeguard = NewtonSafeguard::kBacktrack;
  int max_halvings = 12;
  /// Eigenvalue floor applied to -H before inversion. Unset means 1e-12 * M.
  std::optional<double> psd_floor;
};

struct EstimatorConfig {
  std::size_t num_paths = 1;
  int single_rounds = 5;
  int cyclic_rounds = 5;
  std::shared_ptr<const Codebook> codebook;
  RefineOptions refine;
  /// Optional early stop for unknown path count: detection stops once the
  /// best codeword cost drops below stop_threshold * M * sigma^2.
  std::optional<double> stop_threshold;

  /// Throws std::invalid_argument on num_paths == 0, negative rounds, or a
  /// missing codebook.
  void validate() const;
};

enum class RefineStage { kSingle, kCyclic, kAnchored };

/// One call of the guarded Newton update, as seen by the instrumentation hook.
struct RefineRecord {
  std::size_t path = 0;
  int round = 0;
  RefineStage stage = RefineStage::kSingle;
  PathParams params;
  double cost_before = 0.0;
  double cost = 0.0;
  /// A step was attempted.
  bool stepped = false;
  /// Step kept after the residual-energy check.
  bool accepted = false;
};

using RefineHook = std::function<void(const RefineRecord&)>;

/// f(mu) = sum_m 2 |y_m| g cos(psi_m) - M g^2.
double objective_f(const ArrayConfig& cfg, const CVector& y,
                   const PathParams& p);

/// G_y(theta, r) = |b^H y|^2 / M.
double cost(const ArrayConfig& cfg, const CVector& y, double theta, double r);

/// b^H y / M.
cplx ls_gain(const ArrayConfig& cfg, const CVector& y, double theta, double r);

/// (theta, r) with the least-squares gain split into magnitude and phase.
PathParams with_ls_gain(const ArrayConfig& cfg, const CVector& y, double theta,
                        double r);

/// Analytic gradient of f in the order (theta, r, g, phi).
Eigen::Vector4d grad_f(const ArrayConfig& cfg, const CVector& y,
                       const PathParams& p);

/// Analytic Hessian of f in the order (theta, r, g, phi).
Eigen::Matrix4d hess_f(const ArrayConfig& cfg, const CVector& y,
                       const PathParams& p);

/// sigma^2 (-H)^{-1} at p, with the eigenvalues of -H floored at psd_floor.
Eigen::Matrix4d soft_covariance(const ArrayConfig& cfg, const Measurement& y,
                                const PathParams& p, double psd_floor);

/// One guarded Newton update: concavity test, Rayleigh-distance clamp and
/// residual-energy check on (theta, r), then LS gain and covariance refresh.
SoftEstimate newton_refine_once(const ArrayConfig& cfg, const Measurement& y,
                                const SoftEstimate& est,
                                const RefineOptions& options = {},
                                RefineRecord* record = nullptr);

/// y minus the channels of the fixed estimates.
CVector residual(const ArrayConfig& cfg, const CVector& y,
                 std::span<const SoftEstimate> fixed);

/// Exhaustive codebook scan maximising G; ties go to the lowest index.
/// The covariance is a grid-cell-sized diagonal.
SoftEstimate omp_detect(const Measurement& residual_measurement,
                        const Codebook& codebook);

/// Detection, single refinement and cyclic refinement for up to num_paths
/// paths.
std::vector<SoftEstimate> vnnce(const Measurement& y,
                                const EstimatorConfig& cfg,
                                const RefineHook& hook = {});

/// R_c rounds of cyclic refinement over the current estimates. Paths with
/// frozen[k] set keep (theta, r) and only refresh their LS gain.
void refine_cyclic(const ArrayConfig& array, const Measurement& y,
                   std::vector<SoftEstimate>& estimates,
                   std::span<const bool> frozen, const EstimatorConfig& cfg,
                   const RefineHook& hook = {});

struct OracleLsResult {
  CVector channel;
  std::vector<cplx> gains;
  bool rank_deficient = false;
};

/// Joint least-squares gains on the true steering vectors.
OracleLsResult oracle_ls(const ArrayConfig& cfg, const CVector& y,
                         std::span<const PathParams> true_paths);

}  // namespace nearfield
