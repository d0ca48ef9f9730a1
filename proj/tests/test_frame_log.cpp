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

#include <sstream>

#include <gtest/gtest.h>

#include "mothijack/errors.hpp"
#include "mothijack/frame_log.hpp"

using namespace mothijack;

TEST(FrameLog, SnapshotRoundTrips) {
  TrackManager tm(TrackerConfig{});
  TrackSnapshot snap;
  for (int t = 0; t < 8; ++t) {
    BBox const d[] = {BBox(10 + t, 20, 30, 40), BBox(300, 200 + t, 20, 20)};
    snap = tm.step(d);
  }
  FrameLog log;
  log.add(snap);
  ASSERT_EQ(log.lines().size(), 1u);
  TrackSnapshot const back = parse_frame_line(log.lines()[0]);
  EXPECT_EQ(back.frame, snap.frame);
  ASSERT_EQ(back.tracks.size(), snap.tracks.size());
  for (std::size_t i = 0; i < snap.tracks.size(); ++i) {
    EXPECT_EQ(back.tracks[i].id, snap.tracks[i].id);
    EXPECT_EQ(back.tracks[i].status, snap.tracks[i].status);
    EXPECT_EQ(back.tracks[i].box, snap.tracks[i].box);
    EXPECT_EQ(back.tracks[i].predicted, snap.tracks[i].predicted);
    EXPECT_EQ(back.tracks[i].velocity, snap.tracks[i].velocity);
    EXPECT_EQ(back.tracks[i].hits, snap.tracks[i].hits);
  }
}

TEST(FrameLog, AnnotationIsRecorded) {
  FrameLog log;
  TrackSnapshot snap;
  snap.frame = 3;
  FrameAnnotation note{"hijack", BBox(1, 2, 3, 4), BBox(2, 2, 3, 4), Vec2{1, 0}, true};
  log.add(snap, note);
  log.add(snap);
  std::ostringstream out;
  log.write(out);
  std::string const text = out.str();
  EXPECT_NE(log.lines()[0].find("\"attack\""), std::string::npos);
  EXPECT_NE(log.lines()[0].find("\"fabricated\""), std::string::npos);
  EXPECT_EQ(log.lines()[1].find("\"attack\""), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST(FrameLog, RejectsGarbage) {
  EXPECT_THROW(parse_frame_line("{not json"), ParseError);
  EXPECT_THROW(parse_frame_line(R"({"frame":0,"tracks":[{"id":1,"status":"zombie","box":[0,0,1,1],"predicted":[0,0,1,1],"velocity":[0,0],"hits":0,"misses":0}]})"),
               ParseError);
}
