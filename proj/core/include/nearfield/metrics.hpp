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

#include <span>

#include <Eigen/Core>

#include "nearfield/types.hpp"

namespace nearfield {

/// ||h - h_est||^2 / ||h||^2. Throws std::invalid_argument on a zero or
/// length-mismatched true channel.
double nmse(const CVector& h_true, const CVector& h_est);

/// 10 log10(x); 0 maps to -infinity.
double to_db(double ratio);

/// sqrt(mean(e^2)). Throws std::invalid_argument on empty input.
double rmse(std::span<const double> errors);
double rmse(std::span<const Eigen::Vector2d> errors);

/// 20 log10(rmse in meters).
double to_dbmeter(double rmse_m);

}  // namespace nearfield
