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

#include <filesystem>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "mothijack/errors.hpp"
#include "mothijack/scenarios.hpp"

using namespace mothijack;

namespace {

std::filesystem::path const kFixtures = std::filesystem::path(MOTHIJACK_DATA_DIR) / "fixtures";

Scenario parse(std::string const& text, int h = 6) {
  std::istringstream in(text);
  return parse_scenario(in, h);
}

std::string const kHeader =
    "mothijack-scenario 1\nfps 30\nimage 640 480\ntarget a\npatch 10 10 4 4\n";

std::string records(int frames) {
  std::string out;
  for (int f = 0; f < frames; ++f) out += std::to_string(f) + " a car " + std::to_string(10 + f) + " 10 8 8\n";
  return out;
}

}  // namespace

TEST(ScenarioFile, MinimalFixtureLoads) {
  Scenario const s = load_scenario(kFixtures / "minimal.txt");
  EXPECT_EQ(s.name, "minimal");
  EXPECT_EQ(s.frames.size(), 24u);
  EXPECT_EQ(s.target_label, "lead");
  ASSERT_TRUE(s.attack_direction.has_value());
  EXPECT_EQ(*s.attack_direction, (Vec2{1, 0}));
  ASSERT_NE(s.frames[3].find("parked"), nullptr);
  EXPECT_EQ(s.frames[3].find("ghost"), nullptr);
  EXPECT_EQ(s.frames[3].bboxes().size(), 2u);
}

TEST(ScenarioFile, GapNamesMissingFrame) {
  try {
    load_scenario(kFixtures / "gap_in_frames.txt");
    FAIL() << "expected ValidationError";
  } catch (ValidationError const& e) {
    EXPECT_NE(std::string(e.what()).find("frame 9"), std::string::npos) << e.what();
  }
}

TEST(ScenarioFile, DuplicateIdentityNamesFrameAndLine) {
  try {
    load_scenario(kFixtures / "duplicate_identity.txt");
    FAIL() << "expected ValidationError";
  } catch (ValidationError const& e) {
    std::string const msg = e.what();
    EXPECT_NE(msg.find("frame 4"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line"), std::string::npos) << msg;
  }
}

TEST(ScenarioFile, EmptyFileIsParseError) {
  EXPECT_THROW(load_scenario(kFixtures / "empty.txt"), ParseError);
  EXPECT_THROW(parse("# only a comment\n\n"), ParseError);
}

TEST(ScenarioFile, MissingFileIsParseError) {
  EXPECT_THROW(load_scenario(kFixtures / "does_not_exist.txt"), ParseError);
}

TEST(ScenarioParse, ReportsLineNumbers) {
  try {
    parse(kHeader + "bogus 1\n" + records(8));
    FAIL();
  } catch (ParseError const& e) {
    EXPECT_EQ(e.line(), 6);
  }
  try {
    parse(kHeader + "0 a car 1 x 3 4\n");
    FAIL();
  } catch (ParseError const& e) {
    EXPECT_EQ(e.line(), 6);
  }
}

TEST(ScenarioParse, RejectsBadHeaderAndVersion) {
  EXPECT_THROW(parse("fps 30\n"), ParseError);
  EXPECT_THROW(parse("mothijack-scenario 2\n"), ParseError);
  EXPECT_THROW(parse("mothijack-scenario 1\nimage 640 480\ntarget a\npatch 1 1 1 1\n" + records(8)),
               ParseError);
}

TEST(ScenarioParse, RejectsInvalidBoxes) {
  EXPECT_THROW(parse(kHeader + "0 a car 1 1 0 4\n" + records(8)), ValidationError);
  EXPECT_THROW(parse(kHeader + "0 a car 1 1 nan 4\n"), Error);
}

TEST(ScenarioParse, TargetMustCoverWarmUp) {
  EXPECT_NO_THROW(parse(kHeader + records(7)));
  EXPECT_THROW(parse(kHeader + records(6)), ValidationError);
  EXPECT_NO_THROW(parse(kHeader + records(3), 2));
}

TEST(ScenarioParse, CommentsAndBlankLines) {
  Scenario const s = parse("# leading\n" + kHeader + "\n" + records(8) + "# trailing\n");
  EXPECT_EQ(s.frames.size(), 8u);
}

TEST(ScenarioText, RoundTripIsCanonical) {
  for (Scenario const& s : {gen_move_in({}), gen_move_out({}), gen_straight_line({}),
                            gen_heading_change({}), load_scenario(kFixtures / "minimal.txt")}) {
    std::string const text = to_text(s);
    Scenario const back = parse(text);
    EXPECT_EQ(to_text(back), text) << s.name;
    ASSERT_EQ(back.frames.size(), s.frames.size());
    for (std::size_t i = 0; i < s.frames.size(); ++i) {
      for (std::size_t j = 0; j < s.frames[i].boxes.size(); ++j) {
        EXPECT_EQ(back.frames[i].boxes[j].box, s.frames[i].boxes[j].box);
      }
    }
    EXPECT_EQ(back.patch.bounds, s.patch.bounds);
  }
}

TEST(ScenarioText, SaveAndLoad) {
  auto const path = std::filesystem::temp_directory_path() / "mothijack_roundtrip.txt";
  Scenario const s = gen_move_out({});
  save_scenario(path, s);
  EXPECT_EQ(to_text(load_scenario(path)), to_text(s));
  std::filesystem::remove(path);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(30), "30");
  EXPECT_EQ(format_number(-2.5), "-2.5");
  double const x = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(Camera, PinholeProjection) {
  CameraModel const cam;
  BBox const b = cam.project(0.0, 10.0);
  EXPECT_DOUBLE_EQ(b.cx(), 640.0);
  EXPECT_DOUBLE_EQ(b.w(), 180.0);
  EXPECT_DOUBLE_EQ(b.h(), 150.0);
  EXPECT_GT(cam.project(2.0, 10.0).cx(), b.cx());
}

TEST(Generators, DeterministicPerSeed) {
  MoveInParams p;
  EXPECT_EQ(to_text(gen_move_in(p)), to_text(gen_move_in(p)));
  MoveInParams q = p;
  q.seed = p.seed + 1;
  EXPECT_NE(to_text(gen_move_in(p)), to_text(gen_move_in(q)));
}

TEST(Generators, MoveInGrowsAndPointsInward) {
  MoveInParams p;
  p.sigma = 0.0;
  Scenario const s = gen_move_in(p);
  EXPECT_EQ(s.frames.size(), 120u);
  BBox const first = s.frames.front().boxes[0].box;
  BBox const last = s.frames.back().boxes[0].box;
  EXPECT_GT(last.w(), first.w());
  EXPECT_GT(last.cx(), first.cx());  // parked car on the right slides outward
  EXPECT_EQ(*s.attack_direction, (Vec2{-1, 0}));
  p.lateral_offset = -3.5;
  EXPECT_EQ(*gen_move_in(p).attack_direction, (Vec2{1, 0}));
}

TEST(Generators, MoveOutPointsOffRoad) {
  MoveOutParams p;
  EXPECT_EQ(*gen_move_out(p).attack_direction, (Vec2{1, 0}));
  p.lateral_offset = -0.2;
  EXPECT_EQ(*gen_move_out(p).attack_direction, (Vec2{-1, 0}));
}

TEST(Generators, PatchSitsOnTargetAtAnchorFrame) {
  MoveOutParams p;
  p.sigma = 0.0;
  Scenario const s = gen_move_out(p);
  BBox const t = s.frames[15].boxes[0].box;
  EXPECT_NEAR(s.patch.bounds.cx(), t.cx(), 1e-9);
  EXPECT_NEAR(s.patch.bounds.w(), 0.6 * t.w(), 1e-9);
}

TEST(Generators, StraightLineIsExact) {
  Scenario const s = gen_straight_line({});
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    BBox const b = s.frames[i].boxes[0].box;
    EXPECT_DOUBLE_EQ(b.cx(), 300.0 + 2.0 * i);
    EXPECT_DOUBLE_EQ(b.cy(), 360.0 + 0.5 * i);
  }
}

TEST(Generators, HeadingChangeTurns) {
  HeadingChangeParams p;
  p.turn_degrees = 90;
  Scenario const s = gen_heading_change(p);
  auto const& f = s.frames;
  double const dx_before = f[30].boxes[0].box.cx() - f[29].boxes[0].box.cx();
  double const dx_after = f[60].boxes[0].box.cx() - f[59].boxes[0].box.cx();
  EXPECT_NEAR(dx_before, 2.0, 1e-9);
  EXPECT_NEAR(dx_after, -0.5, 1e-9);
}

TEST(Generators, RejectBadParameters) {
  MoveInParams p;
  p.frames = 5;
  EXPECT_THROW(gen_move_in(p), std::invalid_argument);
  p.frames = 400;
  EXPECT_THROW(gen_move_in(p), std::invalid_argument);  // car would pass the camera
}

TEST(Jitter, ZeroSigmaIsIdentity) {
  Scenario const s = gen_straight_line({});
  EXPECT_EQ(to_text(with_jitter(s, 0.0, 9)), to_text(s));
  EXPECT_NE(to_text(with_jitter(s, 1.0, 9)), to_text(s));
  EXPECT_EQ(to_text(with_jitter(s, 1.0, 9)), to_text(with_jitter(s, 1.0, 9)));
}
