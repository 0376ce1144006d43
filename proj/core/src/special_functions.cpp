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

#include "nearfield/special_functions.hpp"

#include <cmath>
#include <complex>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nearfield/types.hpp"

namespace nearfield {

namespace {

// Integrates over panels [sqrt(k), sqrt(k+1)], on each of which the phase
// pi t^2 / 2 advances by pi / 2, so a single Kronrod rule is nearly exact.
FresnelPair fresnel_nonnegative(double x) {
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
  constexpr unsigned kMaxDepth = 12;
  constexpr double kTol = 1e-14;

  auto cos_term = [](double t) { return std::cos(0.5 * kPi * t * t); };
  auto sin_term = [](double t) { return std::sin(0.5 * kPi * t * t); };

  FresnelPair out;
  double lo = 0.0;
  for (long k = 1; lo < x; ++k) {
    const double hi = std::min(x, std::sqrt(static_cast<double>(k)));
    out.c += Quadrature::integrate(cos_term, lo, hi, kMaxDepth, kTol);
    out.s += Quadrature::integrate(sin_term, lo, hi, kMaxDepth, kTol);
    lo = hi;
  }
  return out;
}

}  // namespace

FresnelPair fresnel(double x) {
  if (x == 0.0) return {};
  if (x < 0.0) {
    const auto p = fresnel_nonnegative(-x);
    return {-p.c, -p.s};
  }
  return fresnel_nonnegative(x);
}

double s1(double alpha) {
  if (alpha == 0.0) return 1.0;
  const double z = kPi * alpha;
  return std::abs(std::sin(z) / z);
}

double s2(double beta) {
  if (beta == 0.0) return 1.0;
  const double x = std::sqrt(std::abs(beta));
  const auto p = fresnel(x);
  return std::abs(std::complex<double>(p.c, p.s)) / x;
}

}  // namespace nearfield
