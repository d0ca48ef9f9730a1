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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mothijack/geometry.hpp"
#include "mothijack/tracking.hpp"

namespace mothijack {

/// What the attacker did to one frame's detections.
struct FrameAnnotation {
  std::string kind;  // "hijack" or "erase"
  std::optional<BBox> erased;
  std::optional<BBox> fabricated;
  std::optional<Vec2> shift;
  bool ae_applied = true;  // false when the per-frame AE was drawn as failed
};

/// Line-delimited JSON frame log, one object per frame:
///
///   {"frame":12,"tracks":[{"id":1,"status":"confirmed","box":[cx,cy,w,h],
///     "predicted":[...],"velocity":[vx,vy],"hits":7,"misses":0}],
///    "attack":{"kind":"hijack","erased":[...],"fabricated":[...],"shift":[dx,dy],
///              "ae_applied":true}}
///
/// The "attack" member is present only on attacked frames.
class FrameLog {
 public:
  void add(TrackSnapshot const& snap, std::optional<FrameAnnotation> const& note = std::nullopt);
  std::vector<std::string> const& lines() const { return lines_; }
  void write(std::ostream& out) const;

 private:
  std::vector<std::string> lines_;
};

/// Parses a frame log line back into a snapshot (the annotation is dropped).
TrackSnapshot parse_frame_line(std::string const& line);

}  // namespace mothijack
