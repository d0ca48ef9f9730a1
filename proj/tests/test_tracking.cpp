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

#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "mothijack/tracking.hpp"

using namespace mothijack;

namespace {

BBox moving(int t) { return BBox(100 + 2.0 * t, 200 + 0.5 * t, 40, 30); }

TrackView const* view(TrackSnapshot const& s, int id) {
  for (auto const& t : s.tracks) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

// Frame index at which the single track first appears confirmed.
int confirmation_frame(TrackerConfig const& cfg) {
  TrackManager tm(cfg);
  for (int t = 0; t < 100; ++t) {
    BBox const d[] = {moving(t)};
    TrackSnapshot const s = tm.step(d);
    if (view(s, 1)->status == TrackStatus::kConfirmed) return t;
  }
  return -1;
}

// Misses a confirmed track survives before it is dropped.
int misses_until_deleted(TrackerConfig const& cfg) {
  TrackManager tm(cfg);
  int t = 0;
  for (; t < 20; ++t) {
    BBox const d[] = {moving(t)};
    tm.step(d);
  }
  EXPECT_EQ(tm.find(1)->status, TrackStatus::kConfirmed);
  for (int miss = 1; miss < 1000; ++miss) {
    TrackSnapshot const s = tm.step({});
    if (view(s, 1) == nullptr) return miss;
  }
  return -1;
}

}  // namespace

TEST(TrackerConfig, DefaultsFollowFrameRate) {
  TrackerConfig const c = TrackerConfig::for_fps(30);
  EXPECT_EQ(c.reserved_age, 60);
  EXPECT_EQ(c.hit_count, 6);
  TrackerConfig const d;
  EXPECT_EQ(d.reserved_age, 60);
  EXPECT_EQ(d.hit_count, 6);
  TrackerConfig const s = TrackerConfig::short_memory();
  EXPECT_EQ(s.reserved_age, 5);
  EXPECT_EQ(s.hit_count, 2);
}

TEST(TrackerConfig, RejectsInvalid) {
  TrackerConfig c;
  c.reserved_age = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.iou_gate = 1.0;
  EXPECT_THROW(TrackManager{c}, std::invalid_argument);
}

TEST(Lifecycle, ConfirmsAfterHitCountHits) {
  TrackerConfig c;
  EXPECT_EQ(confirmation_frame(c), 6);
  c.reserved_age = 5;
  c.hit_count = 2;
  EXPECT_EQ(confirmation_frame(c), 2);
  c.hit_count = 1;
  EXPECT_EQ(confirmation_frame(c), 1);
}

TEST(Lifecycle, ConfirmedTrackDeletedAtReservedAge) {
  TrackerConfig c;
  EXPECT_EQ(misses_until_deleted(c), 60);
  EXPECT_EQ(misses_until_deleted(TrackerConfig::short_memory()), 5);
}

TEST(Lifecycle, CoastingTrackKeepsConfirmedStatusAndMoves) {
  TrackManager tm(TrackerConfig{});
  for (int t = 0; t < 20; ++t) {
    BBox const d[] = {moving(t)};
    tm.step(d);
  }
  double const x = tm.find(1)->kf.x(0);
  TrackSnapshot const s = tm.step({});
  TrackView const* v = view(s, 1);
  ASSERT_NE(v, nullptr);
  EXPECT_EQ(v->status, TrackStatus::kConfirmed);
  EXPECT_EQ(v->misses, 1);
  EXPECT_EQ(v->hits, 0);
  EXPECT_NEAR(v->box.cx() - x, 2.0, 0.05);
  EXPECT_EQ(tm.confirmed().size(), 1u);
}

TEST(Lifecycle, TentativeTrackDroppedOnFirstMiss) {
  TrackManager tm(TrackerConfig{});
  for (int t = 0; t < 3; ++t) {
    BBox const d[] = {moving(t)};
    tm.step(d);
  }
  EXPECT_EQ(tm.find(1)->status, TrackStatus::kTentative);
  TrackSnapshot const s = tm.step({});
  EXPECT_TRUE(s.tracks.empty());
  EXPECT_EQ(tm.find(1), nullptr);
}

TEST(Lifecycle, MissResetsHitsButConfirmationSticks) {
  TrackManager tm(TrackerConfig{});
  int t = 0;
  for (; t < 10; ++t) {
    BBox const d[] = {moving(t)};
    tm.step(d);
  }
  tm.step({});
  ++t;
  EXPECT_EQ(tm.find(1)->hits, 0);
  BBox const d[] = {moving(t)};
  TrackSnapshot const s = tm.step(d);
  EXPECT_EQ(view(s, 1)->status, TrackStatus::kConfirmed);
  EXPECT_EQ(view(s, 1)->hits, 1);
  EXPECT_EQ(view(s, 1)->misses, 0);
}

TEST(Tracker, IdsStartAtOneAndAreNeverReused) {
  TrackManager tm(TrackerConfig{});
  BBox const two[] = {BBox(0, 0, 10, 10), BBox(100, 100, 10, 10)};
  TrackSnapshot s = tm.step(two);
  EXPECT_EQ(s.detection_track, (std::vector<int>{1, 2}));
  s = tm.step({});  // both tentative, both dropped
  EXPECT_TRUE(s.tracks.empty());
  BBox const one[] = {BBox(0, 0, 10, 10)};
  s = tm.step(one);
  EXPECT_EQ(s.detection_track, std::vector<int>{3});
}

TEST(Tracker, SnapshotFramesCount) {
  TrackManager tm(TrackerConfig{});
  EXPECT_EQ(tm.step({}).frame, 0);
  EXPECT_EQ(tm.step({}).frame, 1);
  EXPECT_EQ(tm.frames_seen(), 2);
}

TEST(Tracker, FindTrackOfIsReadOnly) {
  TrackManager tm(TrackerConfig{});
  int t = 0;
  for (; t < 10; ++t) {
    BBox const d[] = {moving(t)};
    tm.step(d);
  }
  auto const before = tm.predicted_next();
  EXPECT_EQ(tm.find_track_of(moving(t)), 1);
  EXPECT_EQ(tm.find_track_of(BBox(900, 600, 40, 30)), std::nullopt);
  EXPECT_EQ(tm.predicted_next(), before);
  EXPECT_EQ(tm.frames_seen(), 10);
  BBox const frame[] = {BBox(900, 600, 40, 30), moving(t)};
  EXPECT_EQ(tm.find_track_of(frame, 1), 1);
  EXPECT_EQ(tm.find_track_of(frame, 0), std::nullopt);
  EXPECT_THROW(tm.find_track_of(frame, 2), std::out_of_range);
}

TEST(Tracker, LearnsVelocity) {
  TrackManager tm(TrackerConfig{});
  for (int t = 0; t < 40; ++t) {
    BBox const d[] = {moving(t)};
    tm.step(d);
  }
  auto const c = tm.confirmed();
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0].velocity.dx, 2.0, 0.05);
  EXPECT_NEAR(c[0].velocity.dy, 0.5, 0.05);
}

TEST(Tracker, StatusNames) {
  EXPECT_EQ(to_string(TrackStatus::kTentative), "tentative");
  EXPECT_EQ(to_string(TrackStatus::kConfirmed), "confirmed");
  EXPECT_EQ(to_string(TrackStatus::kDeleted), "deleted");
}
