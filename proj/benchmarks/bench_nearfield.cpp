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

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "nearfield/channel_model.hpp"
#include "nearfield/codebook.hpp"
#include "nearfield/crlb.hpp"
#include "nearfield/localization.hpp"
#include "nearfield/vnnce.hpp"

using namespace nearfield;

namespace {

ArrayConfig array_of(benchmark::State& state) {
  return ArrayConfig(static_cast<int>(state.range(0)), 0.003);
}

const std::vector<PathParams> kPaths{{1.1, 0.0, 1.0, 0.4}, {2.0, 0.0, 0.3, 2.1}};

// Paths placed at a fixed fraction of the near-field range.
std::vector<PathParams> paths_for(const ArrayConfig& a, std::size_t n) {
  std::vector<PathParams> out(kPaths.begin(), kPaths.begin() + n);
  for (std::size_t l = 0; l < n; ++l)
    out[l].r = a.min_distance() + (0.3 + 0.4 * l) * (a.rayleigh_distance() - a.min_distance());
  return out;
}

void BM_BuildCodebook(benchmark::State& state) {
  const ArrayConfig a = array_of(state);
  for (auto _ : state) {
    Codebook cb(a, {});
    benchmark::DoNotOptimize(cb.size());
  }
}
BENCHMARK(BM_BuildCodebook)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_OmpDetect(benchmark::State& state) {
  const ArrayConfig a = array_of(state);
  const Codebook cb(a, {});
  const Measurement y = add_noise(synthesize_channel(a, paths_for(a, 1)), 1e-3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(omp_detect(y, cb));
  state.counters["codewords"] = static_cast<double>(cb.size());
}
BENCHMARK(BM_OmpDetect)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_Vnnce(benchmark::State& state) {
  const ArrayConfig a = array_of(state);
  EstimatorConfig cfg;
  cfg.num_paths = static_cast<std::size_t>(state.range(1));
  cfg.codebook = std::make_shared<const Codebook>(a, CodebookConfig{});
  const Measurement y = add_noise(synthesize_channel(a, paths_for(a, cfg.num_paths)), 1e-3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(vnnce(y, cfg));
}
BENCHMARK(BM_Vnnce)->Args({64, 1})->Args({64, 2})->Args({256, 2})->Unit(benchmark::kMillisecond);

void BM_Fim(benchmark::State& state) {
  const ArrayConfig a = array_of(state);
  const auto paths = paths_for(a, 2);
  for (auto _ : state) benchmark::DoNotOptimize(crlb_diag(fim(a, paths, 1e-3)));
}
BENCHMARK(BM_Fim)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_PositionCovariance(benchmark::State& state) {
  const ArrayConfig a = array_of(state);
  const auto paths = paths_for(a, 1);
  const Measurement y = add_noise(synthesize_channel(a, paths), 1e-3, 3);
  const SoftEstimate est{paths[0], Eigen::Matrix4d::Identity()};
  for (auto _ : state) benchmark::DoNotOptimize(position_covariance(a, y, est, 0.3));
}
BENCHMARK(BM_PositionCovariance)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
