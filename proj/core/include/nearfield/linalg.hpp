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

#include <Eigen/Dense>

namespace nearfield {

/// Raises every eigenvalue of the symmetric matrix a below floor to floor.
/// Sets *repaired when any eigenvalue was raised.
template <typename Matrix>
Matrix floor_eigenvalues(const Matrix& a, double floor,
                         bool* repaired = nullptr) {
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  auto values = eig.eigenvalues().eval();
  bool changed = false;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!(values[i] >= floor)) {
      values[i] = floor;
      changed = true;
    }
  }
  if (repaired) *repaired = changed;
  if (!changed) return sym;
  const auto& v = eig.eigenvectors();
  return v * values.asDiagonal() * v.transpose();
}

/// Inverse of a symmetric positive definite matrix, symmetrised.
template <typename Matrix>
Matrix spd_inverse(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (a + a.transpose()));
  const auto inv_values = eig.eigenvalues().cwiseInverse().eval();
  const auto& v = eig.eigenvectors();
  return v * inv_values.asDiagonal() * v.transpose();
}

}  // namespace nearfield
