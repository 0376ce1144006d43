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

namespace nearfield {

struct FresnelPair {
  double c = 0.0;  ///< C(x) = int_0^x cos(pi t^2 / 2) dt
  double s = 0.0;  ///< S(x) = int_0^x sin(pi t^2 / 2) dt
};

/// Fresnel integrals by adaptive Gauss-Kronrod quadrature, absolute error
/// below 1e-10. Negative x uses the odd symmetry of C and S.
FresnelPair fresnel(double x);

/// Angle-domain correlation loss |sin(pi a) / (pi a)|, equal to 1 at a = 0.
double s1(double alpha);

/// Distance-domain correlation loss |C(sqrt|b|) + j S(sqrt|b|)| / sqrt|b|,
/// equal to 1 at b = 0 and even in b.
double s2(double beta);

}  // namespace nearfield
