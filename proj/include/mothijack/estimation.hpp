// Copyright 2026 The mot_hijack Authors
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

#include <utility>

#include <Eigen/Core>

#include "mothijack/geometry.hpp"

namespace mothijack {

using StateVector = Eigen::Matrix<double, 6, 1>;
using StateCovariance = Eigen::Matrix<double, 6, 6>;

/// Per-track filter state. x = [cx, cy, w, h, vx, vy]: constant velocity on
/// the center, random walk on the size.
struct KalmanState {
  StateVector x = StateVector::Zero();
  StateCovariance P = StateCovariance::Identity();

  BBox box() const;
};

/// `cov` scales the isotropic measurement covariance (cov * I4); `q` scales
/// the process noise diag(0.01, 0.01, 0.01, 0.01, 0.1, 0.1).
struct NoiseConfig {
  double cov = 0.1;
  double q = 1.0;

  void validate() const;
};

/// Smallest width/height a posterior may take.
inline constexpr double kMinBoxSide = 1.0;

KalmanState kf_init(BBox const& measurement, NoiseConfig const& noise);

/// One constant-velocity step. Returns the propagated state and its box.
std::pair<KalmanState, BBox> kf_predict(KalmanState const& s, NoiseConfig const& noise);

/// Joseph-form measurement update with z = [cx, cy, w, h].
KalmanState kf_update(KalmanState const& s, BBox const& z, NoiseConfig const& noise);

Vec2 velocity(KalmanState const& s);

}  // namespace mothijack
