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

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mothijack/estimation.hpp"
#include "mothijack/geometry.hpp"

namespace mothijack {

enum class TrackStatus { kTentative, kConfirmed, kDeleted };

std::string_view to_string(TrackStatus s);

/// MOT tuning knobs. `reserved_age` (R) is the number of consecutive missed
/// frames that deletes a track; `hit_count` (H) is the number of consecutive
/// matches after birth that confirms it.
struct TrackerConfig {
  int reserved_age = 60;
  int hit_count = 6;
  double iou_gate = 0.3;
  NoiseConfig noise;
  double fps = 30.0;

  /// R = 2 * fps, H = 0.2 * fps (rounded, at least 1).
  static TrackerConfig for_fps(double fps);
  /// The conservative R = 5, H = 2 preset.
  static TrackerConfig short_memory();

  void validate() const;
};

struct Track {
  int id = 0;
  KalmanState kf;
  BBox predicted{0.0, 0.0, 1.0, 1.0};  // prior box of the current frame
  int hits = 0;
  int misses = 0;
  int total_hits = 0;
  TrackStatus status = TrackStatus::kTentative;
};

struct TrackView {
  int id = 0;
  TrackStatus status = TrackStatus::kTentative;
  BBox box{0.0, 0.0, 1.0, 1.0};        // state estimate (== predicted while coasting)
  BBox predicted{0.0, 0.0, 1.0, 1.0};  // prior box used for association
  Vec2 velocity;
  int hits = 0;
  int misses = 0;
};

struct TrackSnapshot {
  int frame = 0;
  std::vector<TrackView> tracks;  // live tracks, ordered by id
  /// For each input detection, the track it was assigned to (matched or
  /// newly spawned).
  std::vector<int> detection_track;
};

struct ConfirmedTrack {
  int id = 0;
  BBox box{0.0, 0.0, 1.0, 1.0};
  Vec2 velocity;
};

/// Tracking-by-detection manager: predict, associate, update, lifecycle.
/// Value type; copying it clones the whole tracker state.
class TrackManager {
 public:
  explicit TrackManager(TrackerConfig config);

  TrackSnapshot step(std::span<BBox const> detections);

  std::vector<ConfirmedTrack> confirmed() const;

  /// Track that `associate` would pair `detection` with on the next frame.
  std::optional<int> find_track_of(BBox const& detection) const;
  /// Same, but resolves the whole next-frame detection set jointly and
  /// reports the assignment of `frame[index]`.
  std::optional<int> find_track_of(std::span<BBox const> frame, std::size_t index) const;

  /// One-step-ahead boxes of all live tracks, in `tracks()` order.
  std::vector<BBox> predicted_next() const;

  Track const* find(int id) const;
  std::span<Track const> tracks() const { return tracks_; }
  TrackerConfig const& config() const { return config_; }
  /// Number of frames processed so far.
  int frames_seen() const { return frame_; }

 private:
  TrackerConfig config_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
  int frame_ = 0;
};

}  // namespace mothijack
