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

#include <cmath>
#include <iosfwd>

namespace mothijack {

/// Displacement in image pixels.
struct Vec2 {
  double dx = 0.0;
  double dy = 0.0;

  Vec2 operator-() const { return {-dx, -dy}; }
  Vec2 operator*(double s) const { return {dx * s, dy * s}; }
  double norm() const { return std::hypot(dx, dy); }
  double dot(Vec2 const& o) const { return dx * o.dx + dy * o.dy; }
  bool is_finite() const { return std::isfinite(dx) && std::isfinite(dy); }
  bool operator==(Vec2 const&) const = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(Point2 const&) const = default;
};

/// Axis-aligned box in center-size form. Width and height are strictly
/// positive and every coordinate is finite; the constructor throws
/// std::invalid_argument otherwise.
class BBox {
 public:
  BBox(double cx, double cy, double w, double h);

  double cx() const noexcept { return cx_; }
  double cy() const noexcept { return cy_; }
  double w() const noexcept { return w_; }
  double h() const noexcept { return h_; }

  double left() const noexcept { return cx_ - 0.5 * w_; }
  double right() const noexcept { return cx_ + 0.5 * w_; }
  double top() const noexcept { return cy_ - 0.5 * h_; }
  double bottom() const noexcept { return cy_ + 0.5 * h_; }
  double area() const noexcept { return w_ * h_; }
  Point2 center() const noexcept { return {cx_, cy_}; }

  bool operator==(BBox const&) const = default;

 private:
  double cx_;
  double cy_;
  double w_;
  double h_;
};

std::ostream& operator<<(std::ostream& os, BBox const& b);

/// Rectangular area of the image the attacker controls.
struct PatchRegion {
  BBox bounds;
};

/// Intersection over union, in [0, 1].
double iou(BBox const& a, BBox const& b);

BBox translate(BBox const& b, Vec2 const& d);

/// Closed-interval containment: points on the box boundary count as inside.
bool contains_center(BBox const& candidate, Point2 const& point);

/// Association gate shared by the tracker and the attack planner. Evaluated
/// on the matching cost (1 - IoU) exactly as `associate` does, so a box the
/// planner accepts is never severed by the tracker because of rounding.
inline bool passes_gate(double iou_value, double iou_gate) {
  double const cost = 1.0 - iou_value;
  return cost <= 1.0 - iou_gate;
}

}  // namespace mothijack
