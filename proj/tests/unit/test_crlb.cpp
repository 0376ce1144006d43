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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "nearfield/channel_model.hpp"
#include "nearfield/crlb.hpp"
#include "oracles.hpp"

using namespace nearfield;
using doctest::Approx;

namespace {

const ArrayConfig kArray(64, 0.003);

// Columns d s / d mu_i by Richardson-extrapolated central differences.
Eigen::MatrixXcd fd_jacobian(const std::vector<PathParams>& paths) {
  const auto L = static_cast<Eigen::Index>(paths.size());
  Eigen::MatrixXcd J(64, 4 * L);
  for (Eigen::Index l = 0; l < L; ++l)
    for (int i = 0; i < 4; ++i) {
      const Eigen::Vector4d x = testing::to_vec(paths[l]);
      J.col(4 * l + i) = testing::richardson(
          [&](double s) {
            std::vector<PathParams> moved = paths;
            Eigen::Vector4d y = x;
            y[i] += s;
            moved[l] = testing::to_params(y);
            return CVector(synthesize_channel(kArray, moved));
          },
          testing::fd_step(x, i));
    }
  return J;
}

}  // namespace

TEST_CASE("steering derivatives") {
  Rng rng(5);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const PathParams p = testing::random_path(rng, kArray, 0.05);
    const auto v = steering_derivatives(kArray, p);
    CHECK((v[2].cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK((v[3].cwiseAbs().array() - p.g).abs().maxCoeff() < 1e-12);
    const Eigen::MatrixXcd J = fd_jacobian({p});
    for (int i = 0; i < 4; ++i)
      worst = std::max(worst, (v[i] - J.col(i)).norm() / J.col(i).norm());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("Fisher information") {
  const PathParams p{1.1, 1.4, 0.9, 2.0};
  const FisherMatrix f = fim(kArray, std::vector{p}, 1.0);
  CHECK(f.matrix(2, 2) == Approx(128.0).epsilon(1e-14));
  CHECK(std::abs(f.matrix(2, 0)) < 1e-9);
  CHECK(std::abs(f.matrix(2, 1)) < 1e-9);
  CHECK(std::abs(f.matrix(2, 3)) < 1e-9);
  const FisherMatrix f3 = fim(kArray, std::vector{p}, 3.0);
  CHECK((f3.matrix * 3.0 - f.matrix).cwiseAbs().maxCoeff() <=
        1e-15 * f.matrix.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(fim(kArray, std::vector{p}, 0.0), std::invalid_argument);

  Rng rng(13);
  for (int t = 0; t < 20; ++t) {
    std::vector<PathParams> paths;
    const int L = 1 + t % 3;
    for (int l = 0; l < L; ++l) paths.push_back(testing::random_path(rng, kArray, 0.05));
    const double sigma2 = rng.uniform(0.01, 1.0);
    const FisherMatrix a = fim(kArray, paths, sigma2);
    const Eigen::MatrixXcd J = fd_jacobian(paths);
    const Eigen::MatrixXd ref = (2.0 / sigma2) * (J.adjoint() * J).real();
    CHECK(testing::rel_err(a.matrix, ref) < 1e-5);
    CHECK((a.matrix - a.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a.matrix).eigenvalues()(0);
    CHECK(lo >= -1e-9 * a.matrix.norm());

    const CrlbResult c = crlb_diag(a);
    for (Eigen::Index i = 0; i < c.variances.size(); ++i)
      CHECK(c.variances[i] >= (1.0 / a.matrix(i, i)) * (1 - 1e-12));
  }
}

TEST_CASE("CRLB") {
  const PathParams p{0.8, 2.5, 1.3, 0.1};
  const CrlbResult c = crlb_diag(fim(kArray, std::vector{p}, 1.0));
  CHECK_FALSE(c.pseudo_inverse);
  CHECK(std::abs(c.variances[2] - 0.0078125) <= 1e-12 * 0.0078125);

  // Far-separated paths decouple.
  const PathParams q{2.3, 1.0, 0.7, 1.9};
  const CrlbResult both = crlb_diag(fim(kArray, std::vector{p, q}, 1.0));
  const CrlbResult cq = crlb_diag(fim(kArray, std::vector{q}, 1.0));
  for (int i = 0; i < 4; ++i) {
    CHECK(both.variances[i] == Approx(c.variances[i]).epsilon(0.01));
    CHECK(both.variances[4 + i] == Approx(cq.variances[i]).epsilon(0.01));
  }

  const CrlbResult same = crlb_diag(fim(kArray, std::vector{p, p}, 1.0));
  CHECK(same.pseudo_inverse);
  CHECK(same.variances.allFinite());
}
