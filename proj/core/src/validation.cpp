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

#include "nearfield/validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "nearfield/channel_model.hpp"
#include "nearfield/crlb.hpp"
#include "nearfield/pipeline.hpp"
#include "nearfield/rng.hpp"

namespace nearfield {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

Eigen::Vector4d as_vector(const PathParams& p) { return {p.theta, p.r, p.g, p.phi}; }
PathParams as_params(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

double step_for(const Eigen::Vector4d& x, int i) {
  return 1e-5 * std::max(std::abs(x[i]), 1.0) * (i == 1 ? 0.1 : 1.0);
}

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace

std::vector<CheckResult> validate_invariants(const Scenario& s) {
  std::vector<CheckResult> out;
  const TrialChannels ch = draw_trial(s, derive_seed(s.seed, {0}));
  const ArrayConfig& a = s.array;

  {
    double worst = 0.0;
    for (const auto& paths : ch.paths)
      for (const auto& p : paths)
        worst = std::max(worst, (near_steering(a, p.theta, p.r).cwiseAbs().array() - 1.0)
                                    .abs()
                                    .maxCoeff());
    out.push_back({"steering unit modulus", worst < 1e-12, "max dev " + fmt(worst)});
  }

  {
    bool in_range = true;
    bool nlos_rule = true;
    for (std::size_t i = 0; i < ch.paths.size(); ++i) {
      for (const auto& p : ch.paths[i]) in_range &= a.in_near_field(p.r);
      if (ch.has_los[i])
        for (std::size_t l = 1; l < ch.paths[i].size(); ++l)
          nlos_rule &= ch.paths[i][l].g <= ch.paths[i][0].g / 3.0;
    }
    out.push_back({"paths inside near-field range", in_range, ""});
    out.push_back({"non-line-of-sight gain <= LoS gain / 3", nlos_rule, ""});
  }

  std::vector<BsObservation> obs;
  for (std::size_t i = 0; i < s.bss.size(); ++i) {
    const CVector h = synthesize_channel(a, ch.paths[i]);
    obs.push_back({s.bss[i].config,
                   add_noise(h, s.noise_variance, derive_seed(s.seed, {0, 1, i})), h});
  }

  {
    double g_worst = 0.0;
    double h_worst = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i)
      for (const auto& p : ch.paths[i]) {
        const CVector& y = obs[i].measurement.y;
        const Eigen::Vector4d x = as_vector(p);
        Eigen::Vector4d g_fd;
        Eigen::Matrix4d h_fd;
        for (int k = 0; k < 4; ++k) {
          Eigen::Vector4d xp = x, xm = x;
          const double hk = step_for(x, k);
          xp[k] += hk;
          xm[k] -= hk;
          g_fd[k] = (objective_f(a, y, as_params(xp)) - objective_f(a, y, as_params(xm))) /
                    (2 * hk);
          h_fd.col(k) = (grad_f(a, y, as_params(xp)) - grad_f(a, y, as_params(xm))) / (2 * hk);
        }
        g_worst = std::max(g_worst, rel_err(grad_f(a, y, p), g_fd));
        h_worst = std::max(h_worst, rel_err(hess_f(a, y, p), h_fd));
      }
    out.push_back({"gradient matches finite differences", g_worst < 1e-4,
                   "rel err " + fmt(g_worst)});
    out.push_back({"Hessian matches finite differences of the gradient", h_worst < 1e-4,
                   "rel err " + fmt(h_worst)});
  }

  {
    bool ok = true;
    double asym = 0.0;
    double min_eig = 0.0;
    if (s.noise_variance > 0.0) {
      for (const auto& paths : ch.paths) {
        const FisherMatrix f = fim(a, paths, s.noise_variance);
        asym = std::max(asym, (f.matrix - f.matrix.transpose()).cwiseAbs().maxCoeff());
        const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(f.matrix)
                              .eigenvalues()
                              .minCoeff();
        const double scale = f.matrix.cwiseAbs().maxCoeff();
        min_eig = std::min(min_eig, lo / scale);
      }
      ok = asym == 0.0 && min_eig > -1e-9;
    }
    out.push_back({"FIM symmetric and positive semidefinite", ok,
                   "asym " + fmt(asym) + ", min eig / scale " + fmt(min_eig)});
  }

  const EstimatorConfig cfg = s.estimator_config();
  {
    bool ok = true;
    for (const auto& c : cfg.codebook->codewords())
      ok &= a.in_near_field(c.r) && c.theta > 0.0 && c.theta < kPi;
    out.push_back({"codewords inside near-field range", ok,
                   std::to_string(cfg.codebook->size()) + " codewords"});
  }

  std::atomic<std::size_t> violations{0};
  std::atomic<std::size_t> accepted{0};
  const RefineHook hook = [&](const RefineRecord& r) {
    if (!r.accepted) return;
    ++accepted;
    if (r.cost < r.cost_before) ++violations;
  };
  try {
    JointOptions jo;
    jo.zeta = s.zeta;
    const JointResult jr = run_joint(obs, cfg, jo, hook);
    out.push_back({"refinement cost non-decreasing", violations == 0,
                   std::to_string(violations.load()) + " violations in " +
                       std::to_string(accepted.load()) + " accepted updates"});

    std::vector<SoftPosition> fused_set;
    for (const auto& e : jr.step2.inputs)
      if (e.eta == 1) fused_set.push_back(e.position);
    Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
    double min_trace = std::numeric_limits<double>::infinity();
    for (const auto& p : fused_set) {
      info += p.cov.inverse();
      min_trace = std::min(min_trace, p.cov.trace());
    }
    const double add = rel_err(jr.step2.fused.cov.inverse(), info);
    out.push_back({"fusion information additivity", add < 1e-9, "rel err " + fmt(add)});
    out.push_back({"fusion trace contraction",
                   jr.step2.fused.cov.trace() <= min_trace * (1 + 1e-12), ""});

    bool symmetric = true;
    for (const auto& x : jr.step2.inputs)
      for (const auto& y : jr.step2.inputs)
        symmetric &= consistency(x.position, y.position, s.zeta) ==
                     consistency(y.position, x.position, s.zeta);
    bool ref_ok = true;
    for (const auto& e : jr.step2.inputs)
      if (e.bs == jr.step2.reference) ref_ok &= e.eta == 1;
    out.push_back({"consistency symmetric", symmetric, ""});
    out.push_back({"reference carries eta = 1", ref_ok, ""});
  } catch (const std::exception& e) {
    out.push_back({"joint pipeline runs", false, e.what()});
  }
  return out;
}

}  // namespace nearfield
