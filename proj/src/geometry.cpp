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

#include "mothijack/geometry.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mothijack {

BBox::BBox(double cx, double cy, double w, double h) : cx_(cx), cy_(cy), w_(w), h_(h) {
  if (!(std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) && std::isfinite(h))) {
    throw std::invalid_argument("BBox: non-finite coordinate");
  }
  if (!(w > 0.0) || !(h > 0.0)) {
    throw std::invalid_argument("BBox: width and height must be positive (w=" +
                                std::to_string(w) + ", h=" + std::to_string(h) + ")");
  }
}

std::ostream& operator<<(std::ostream& os, BBox const& b) {
  return os << "BBox(cx=" << b.cx() << ", cy=" << b.cy() << ", w=" << b.w() << ", h=" << b.h()
            << ")";
}

double iou(BBox const& a, BBox const& b) {
  double const iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  double const ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) {
    return 0.0;
  }
  double const inter = iw * ih;
  double const uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

BBox translate(BBox const& b, Vec2 const& d) {
  return BBox(b.cx() + d.dx, b.cy() + d.dy, b.w(), b.h());
}

bool contains_center(BBox const& candidate, Point2 const& point) {
  return point.x >= candidate.left() && point.x <= candidate.right() &&
         point.y >= candidate.top() && point.y <= candidate.bottom();
}

}  // namespace mothijack
