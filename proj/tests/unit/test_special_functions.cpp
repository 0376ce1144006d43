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

#include "nearfield/special_functions.hpp"
#include "nearfield/types.hpp"

using namespace nearfield;
using doctest::Approx;

namespace {

// Reference values from an arbitrary-precision evaluation (30 digits).
struct FresnelRef {
  double x, c, s;
};
constexpr FresnelRef kRefs[] = {
    {0.5, 0.492344225871446392878843665157, 0.0647324328599992776114805122306},
    {1.0, 0.779893400376822829474206413653, 0.438259147390354766076756696625},
    {2.0, 0.488253406075340754500223503357, 0.343415678363698242195300815958},
    {3.7, 0.541945662154487412901026698752, 0.574980349887472906573347832163},
    {10.0, 0.499898694205515723614151847736, 0.46816997858488224040335111081},
};

// Power series C(x) = sum (-1)^n (pi/2)^{2n} x^{4n+1} / ((2n)! (4n+1)),
// S(x) likewise with odd powers; accurate for small x.
std::pair<double, double> fresnel_series(double x) {
  double c = 0.0, s = 0.0;
  double term = x;  // (pi/2)^k x^{2k+1} / k!
  for (int k = 0; k < 60; ++k) {
    const double piece = term / (2 * k + 1);
    switch (k % 4) {
      case 0: c += piece; break;
      case 1: s += piece; break;
      case 2: c -= piece; break;
      case 3: s -= piece; break;
    }
    term *= (kPi / 2) * x * x / (k + 1);
  }
  return {c, s};
}

}  // namespace

TEST_CASE("fresnel against reference values") {
  const FresnelPair zero = fresnel(0.0);
  CHECK(zero.c == 0.0);
  CHECK(zero.s == 0.0);
  for (const auto& ref : kRefs) {
    const FresnelPair f = fresnel(ref.x);
    CHECK(std::abs(f.c - ref.c) <= 1e-10);
    CHECK(std::abs(f.s - ref.s) <= 1e-10);
  }
  const FresnelPair far = fresnel(50.0);
  CHECK(std::abs(far.c - 0.5) < 0.02);
  CHECK(std::abs(far.s - 0.5) < 0.02);
}

TEST_CASE("fresnel against power series") {
  for (double x = 0.05; x <= 2.0; x += 0.05) {
    const auto [c, s] = fresnel_series(x);
    const FresnelPair f = fresnel(x);
    CHECK(std::abs(f.c - c) <= 1e-10);
    CHECK(std::abs(f.s - s) <= 1e-10);
  }
}

TEST_CASE("fresnel is odd") {
  for (double x : {0.3, 1.7, 4.2}) {
    CHECK(fresnel(-x).c == -fresnel(x).c);
    CHECK(fresnel(-x).s == -fresnel(x).s);
  }
}

TEST_CASE("s1") {
  CHECK(s1(0.0) == 1.0);
  CHECK(s1(0.5) == Approx(0.63661977236758134).epsilon(1e-14));
  CHECK(std::abs(s1(1.0)) < 1e-15);
  CHECK(s1(-0.3) == s1(0.3));
}

TEST_CASE("s2") {
  CHECK(s2(0.0) == 1.0);
  CHECK(s2(1.0) == Approx(0.894597561042195094).epsilon(1e-10));
  for (double b : {0.2, 1.5, 2.98, 7.0}) CHECK(s2(-b) == s2(b));
}

TEST_CASE("s1 and s2 peak at zero") {
  for (double x = -5.0; x <= 5.0; x += 0.01) {
    CHECK(s1(x) <= 1.0);
    CHECK(s2(x) <= 1.0 + 1e-12);
    if (std::abs(x) > 1e-9) {
      CHECK(s1(x) < 1.0);
      CHECK(s2(x) < 1.0);
    }
  }
}
