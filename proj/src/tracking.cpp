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

#include "mothijack/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mothijack/assignment.hpp"

namespace mothijack {

std::string_view to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::kTentative:
      return "tentative";
    case TrackStatus::kConfirmed:
      return "confirmed";
    case TrackStatus::kDeleted:
      return "deleted";
  }
  return "unknown";
}

TrackerConfig TrackerConfig::for_fps(double fps) {
  TrackerConfig c;
  c.fps = fps;
  c.reserved_age = std::max(1, static_cast<int>(std::lround(2.0 * fps)));
  c.hit_count = std::max(1, static_cast<int>(std::lround(0.2 * fps)));
  return c;
}

TrackerConfig TrackerConfig::short_memory() {
  TrackerConfig c;
  c.reserved_age = 5;
  c.hit_count = 2;
  return c;
}

void TrackerConfig::validate() const {
  if (reserved_age < 1) throw std::invalid_argument("TrackerConfig: R must be >= 1");
  if (hit_count < 1) throw std::invalid_argument("TrackerConfig: H must be >= 1");
  if (!(iou_gate > 0.0 && iou_gate < 1.0)) {
    throw std::invalid_argument("TrackerConfig: iou gate must lie in (0, 1)");
  }
  if (!(fps > 0.0)) throw std::invalid_argument("TrackerConfig: fps must be positive");
  noise.validate();
}

TrackManager::TrackManager(TrackerConfig config) : config_(config) { config_.validate(); }

TrackSnapshot TrackManager::step(std::span<BBox const> detections) {
  std::vector<BBox> predicted;
  predicted.reserve(tracks_.size());
  for (Track& t : tracks_) {
    auto [state, box] = kf_predict(t.kf, config_.noise);
    t.kf = state;
    t.predicted = box;
    predicted.push_back(box);
  }

  Association const assoc = associate(predicted, detections, config_.iou_gate);

  TrackSnapshot snap;
  snap.frame = frame_;
  snap.detection_track.assign(detections.size(), 0);

  for (auto const& [ti, di] : assoc.matches) {
    Track& t = tracks_[ti];
    t.kf = kf_update(t.kf, detections[di], config_.noise);
    t.hits += 1;
    t.total_hits += 1;
    t.misses = 0;
    if (t.status == TrackStatus::kTentative && t.hits >= config_.hit_count) {
      t.status = TrackStatus::kConfirmed;
    }
    snap.detection_track[di] = t.id;
  }
  for (std::size_t ti : assoc.unmatched_tracks) {
    Track& t = tracks_[ti];
    t.hits = 0;
    t.misses += 1;
    if (t.status == TrackStatus::kTentative || t.misses >= config_.reserved_age) {
      t.status = TrackStatus::kDeleted;
    }
  }
  for (std::size_t di : assoc.unmatched_detections) {
    Track t;
    t.id = next_id_++;
    t.kf = kf_init(detections[di], config_.noise);
    t.predicted = detections[di];
    tracks_.push_back(std::move(t));
    snap.detection_track[di] = tracks_.back().id;
  }

  std::erase_if(tracks_, [](Track const& t) { return t.status == TrackStatus::kDeleted; });

  snap.tracks.reserve(tracks_.size());
  for (Track const& t : tracks_) {
    snap.tracks.push_back(
        {t.id, t.status, t.kf.box(), t.predicted, velocity(t.kf), t.hits, t.misses});
  }
  ++frame_;
  return snap;
}

std::vector<ConfirmedTrack> TrackManager::confirmed() const {
  std::vector<ConfirmedTrack> out;
  for (Track const& t : tracks_) {
    if (t.status == TrackStatus::kConfirmed) {
      out.push_back({t.id, t.kf.box(), velocity(t.kf)});
    }
  }
  return out;
}

std::vector<BBox> TrackManager::predicted_next() const {
  std::vector<BBox> out;
  out.reserve(tracks_.size());
  for (Track const& t : tracks_) {
    out.push_back(kf_predict(t.kf, config_.noise).second);
  }
  return out;
}

std::optional<int> TrackManager::find_track_of(BBox const& detection) const {
  BBox const frame[] = {detection};
  return find_track_of(frame, 0);
}

std::optional<int> TrackManager::find_track_of(std::span<BBox const> frame,
                                               std::size_t index) const {
  if (index >= frame.size()) {
    throw std::out_of_range("find_track_of: detection index out of range");
  }
  std::vector<BBox> const predicted = predicted_next();
  Association const assoc = associate(predicted, frame, config_.iou_gate);
  for (auto const& [ti, di] : assoc.matches) {
    if (di == index) return tracks_[ti].id;
  }
  return std::nullopt;
}

Track const* TrackManager::find(int id) const {
  auto it = std::find_if(tracks_.begin(), tracks_.end(), [id](Track const& t) { return t.id == id; });
  return it == tracks_.end() ? nullptr : &*it;
}

}  // namespace mothijack
