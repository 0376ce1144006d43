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

#include <cstdint>
#include <initializer_list>
#include <random>

#include "nearfield/types.hpp"

namespace nearfield {

/// Counter-based seed derivation (splitmix64 finalizer over a running hash).
/// Child seeds depend only on (base, keys), never on call order.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> keys);

/// Seedable generator used by every stochastic routine in the library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  /// Independent child stream keyed by stream_id.
  Rng split(std::uint64_t stream_id) const {
    return Rng(derive_seed(seed_, {stream_id}));
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return normal_(engine_); }
  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  cplx complex_normal(double variance);

  std::mt19937_64& engine() { return engine_; }

 private:
  static std::uint64_t mix(std::uint64_t s);

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace nearfield
