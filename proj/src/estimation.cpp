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

#include "mothijack/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace mothijack {

namespace {

using MeasurementMatrix = Eigen::Matrix<double, 4, 6>;
using Measurement = Eigen::Matrix<double, 4, 1>;

StateCovariance transition() {
  StateCovariance F = StateCovariance::Identity();
  F(0, 4) = 1.0;
  F(1, 5) = 1.0;
  return F;
}

MeasurementMatrix observation() {
  MeasurementMatrix H = MeasurementMatrix::Zero();
  H.leftCols<4>().setIdentity();
  return H;
}

StateCovariance process_noise(double q) {
  StateVector d;
  d << 0.01, 0.01, 0.01, 0.01, 0.1, 0.1;
  return (q * d).asDiagonal();
}

StateCovariance symmetrized(StateCovariance const& P) { return 0.5 * (P + P.transpose()); }

}  // namespace

BBox KalmanState::box() const { return BBox(x(0), x(1), x(2), x(3)); }

void NoiseConfig::validate() const {
  if (!(cov >= 0.0) || !std::isfinite(cov)) {
    throw std::invalid_argument("NoiseConfig: cov must be finite and >= 0");
  }
  if (!(q >= 0.0) || !std::isfinite(q)) {
    throw std::invalid_argument("NoiseConfig: q must be finite and >= 0");
  }
}

KalmanState kf_init(BBox const& measurement, NoiseConfig const& /*noise*/) {
  KalmanState s;
  s.x << measurement.cx(), measurement.cy(), measurement.w(), measurement.h(), 0.0, 0.0;
  StateVector d;
  d << 1.0, 1.0, 1.0, 1.0, 100.0, 100.0;
  s.P = d.asDiagonal();
  return s;
}

std::pair<KalmanState, BBox> kf_predict(KalmanState const& s, NoiseConfig const& noise) {
  static StateCovariance const F = transition();
  KalmanState out;
  out.x = F * s.x;
  out.P = symmetrized(F * s.P * F.transpose() + process_noise(noise.q));
  return {out, out.box()};
}

KalmanState kf_update(KalmanState const& s, BBox const& z, NoiseConfig const& noise) {
  static MeasurementMatrix const H = observation();
  Measurement zv;
  zv << z.cx(), z.cy(), z.w(), z.h();

  Eigen::Matrix4d const R = noise.cov * Eigen::Matrix4d::Identity();
  Eigen::Matrix4d const S = H * s.P * H.transpose() + R;
  // K = P H^T S^-1, solved rather than inverted.
  Eigen::Matrix<double, 6, 4> const K =
      S.ldlt().solve(H * s.P.transpose()).transpose();

  KalmanState out;
  out.x = s.x + K * (zv - H * s.x);
  StateCovariance const I_KH = StateCovariance::Identity() - K * H;
  out.P = symmetrized(I_KH * s.P * I_KH.transpose() + K * R * K.transpose());

  out.x(2) = std::max(out.x(2), kMinBoxSide);
  out.x(3) = std::max(out.x(3), kMinBoxSide);
  return out;
}

Vec2 velocity(KalmanState const& s) { return {s.x(4), s.x(5)}; }

}  // namespace mothijack
