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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mothijack/geometry.hpp"

namespace mothijack {

/// One detected object in a frame. `identity` follows the object across
/// frames (ground truth, never seen by the tracker); `label` is an opaque
/// class tag.
struct LabeledBox {
  BBox box;
  std::string identity;
  std::string label;
};

struct DetectionFrame {
  int index = 0;
  std::vector<LabeledBox> boxes;

  std::vector<BBox> bboxes() const;
  LabeledBox const* find(std::string const& identity) const;
};

/// Detection-level video clip with the attacker's annotations.
struct Scenario {
  std::string name;
  double fps = 30.0;
  double image_width = 1280.0;
  double image_height = 720.0;
  std::string target_label;
  PatchRegion patch{BBox(0.0, 0.0, 1.0, 1.0)};
  /// Attacker-desired direction preset by the scenario, if any.
  std::optional<Vec2> attack_direction;
  std::vector<DetectionFrame> frames;

  /// Throws ValidationError. The target must be visible in frames
  /// 0..hit_count so that it can confirm before an attack starts.
  void validate(int hit_count = 6) const;
};

inline constexpr int kScenarioFormatVersion = 1;

/// Scenario text format, version 1. Line oriented, '#' starts a comment.
///
///   mothijack-scenario 1
///   name <token>
///   fps <number>
///   image <width> <height>
///   target <identity>
///   patch <cx> <cy> <w> <h>
///   direction <dx> <dy>            (optional)
///   <frame> <identity> <class> <cx> <cy> <w> <h>
///   ...
///
/// Every frame index from 0 to the last one must carry at least one record.
Scenario parse_scenario(std::istream& in, int hit_count = 6);
Scenario load_scenario(std::filesystem::path const& path, int hit_count = 6);

/// Canonical serialization: parse_scenario(write_scenario(s)) == s, and
/// writing a parsed canonical file reproduces it byte for byte.
void write_scenario(std::ostream& out, Scenario const& s);
std::string to_text(Scenario const& s);
void save_scenario(std::filesystem::path const& path, Scenario const& s);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// Pinhole camera used by the synthetic generators. Boxes come from
/// projecting a car of the given metric size standing on flat ground.
struct CameraModel {
  double focal = 1000.0;      // pixels
  double width = 1280.0;      // pixels
  double height = 720.0;      // pixels
  double mount_height = 1.4;  // metres above ground
  double car_width = 1.8;     // metres
  double car_height = 1.5;    // metres

  /// Box of a car whose centre line is `lateral` metres right of the camera
  /// axis at `depth` metres ahead.
  BBox project(double lateral, double depth) const;
};

/// A parked car on the roadside while the ego vehicle drives past. Its box
/// grows and slides outward; the attacker pushes it toward the image centre.
struct MoveInParams {
  double lateral_offset = 3.5;  // metres, sign picks the road side
  double forward_speed = 8.0;   // ego speed, m/s
  double start_depth = 45.0;    // metres
  int frames = 120;
  double fps = 30.0;
  std::uint64_t seed = 1;
  double sigma = 1.0;        // detection jitter, pixels
  double patch_scale = 0.6;  // patch size relative to the target box
  int patch_frame = 15;      // frame whose target box anchors the patch
  CameraModel camera;
};

/// A lead vehicle ahead in the ego lane with small relative motion; the
/// attacker pushes it sideways off the road.
struct MoveOutParams {
  double start_depth = 15.0;       // metres
  double relative_speed = 0.5;     // m/s, positive = pulling away
  double lateral_offset = 0.2;     // metres
  double lateral_sway = 0.15;      // metres, amplitude of a slow lane sway
  double sway_period = 4.0;        // seconds
  int frames = 120;
  double fps = 30.0;
  std::uint64_t seed = 1;
  double sigma = 1.0;
  double patch_scale = 0.6;
  int patch_frame = 15;
  CameraModel camera;
};

/// An object crossing the image on a straight line at constant pixel velocity.
struct StraightLineParams {
  Vec2 start{300.0, 360.0};
  Vec2 velocity{2.0, 0.5};  // pixels per frame
  double width = 80.0;
  double height = 60.0;
  int frames = 120;
  double fps = 30.0;
  std::uint64_t seed = 1;
  double sigma = 0.0;
  Vec2 attack_direction{0.0, 1.0};
};

/// Straight line that turns by `turn_degrees` at `turn_frame` and keeps the
/// new heading at the same speed.
struct HeadingChangeParams {
  StraightLineParams line;
  int turn_frame = 40;
  double turn_degrees = 45.0;
};

Scenario gen_move_in(MoveInParams const& p);
Scenario gen_move_out(MoveOutParams const& p);
Scenario gen_straight_line(StraightLineParams const& p);
Scenario gen_heading_change(HeadingChangeParams const& p);

/// Copy of `s` with independent Gaussian jitter of `sigma` pixels added to
/// every box coordinate (sizes floored at 1 px).
Scenario with_jitter(Scenario const& s, double sigma, std::uint64_t seed);

}  // namespace mothijack
