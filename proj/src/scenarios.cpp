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

#include "mothijack/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mothijack/errors.hpp"

namespace mothijack {

std::vector<BBox> DetectionFrame::bboxes() const {
  std::vector<BBox> out;
  out.reserve(boxes.size());
  for (auto const& b : boxes) out.push_back(b.box);
  return out;
}

LabeledBox const* DetectionFrame::find(std::string const& identity) const {
  auto it = std::find_if(boxes.begin(), boxes.end(),
                         [&](LabeledBox const& b) { return b.identity == identity; });
  return it == boxes.end() ? nullptr : &*it;
}

void Scenario::validate(int hit_count) const {
  if (!(fps > 0.0)) throw ValidationError("fps must be positive");
  if (!(image_width > 0.0 && image_height > 0.0)) {
    throw ValidationError("image bounds must be positive");
  }
  if (target_label.empty()) throw ValidationError("target label is empty");
  if (frames.empty()) throw ValidationError("scenario has no frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    DetectionFrame const& f = frames[i];
    if (f.index != static_cast<int>(i)) {
      throw ValidationError("frame " + std::to_string(i) +
                            " missing (frame indices must be consecutive from 0)");
    }
    std::set<std::string> seen;
    for (auto const& b : f.boxes) {
      if (!seen.insert(b.identity).second) {
        throw ValidationError("frame " + std::to_string(f.index) + ": duplicate identity '" +
                              b.identity + "'");
      }
    }
  }
  int const needed = hit_count + 1;
  for (int i = 0; i < needed; ++i) {
    if (i >= static_cast<int>(frames.size()) || frames[i].find(target_label) == nullptr) {
      throw ValidationError("target '" + target_label + "' must be present in the first " +
                            std::to_string(needed) + " frames (missing at frame " +
                            std::to_string(i) + ")");
    }
  }
  if (attack_direction && attack_direction->norm() == 0.0) {
    throw ValidationError("attack direction must be non-zero");
  }
}

std::string format_number(double v) {
  char buf[64];
  auto const res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_ws(std::string const& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

double parse_double(std::string const& tok, int line, char const* field) {
  double v = 0.0;
  auto const* first = tok.data();
  auto const* last = tok.data() + tok.size();
  auto const res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    throw ParseError(std::string("field '") + field + "': expected a finite number, got '" + tok +
                         "'",
                     line);
  }
  return v;
}

int parse_int(std::string const& tok, int line, char const* field) {
  int v = 0;
  auto const* last = tok.data() + tok.size();
  auto const res = std::from_chars(tok.data(), last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError(std::string("field '") + field + "': expected an integer, got '" + tok + "'",
                     line);
  }
  return v;
}

void expect_arity(std::vector<std::string> const& toks, std::size_t n, int line) {
  if (toks.size() != n) {
    throw ParseError("'" + toks[0] + "' expects " + std::to_string(n - 1) + " value(s), got " +
                         std::to_string(toks.size() - 1),
                     line);
  }
}

BBox make_box(double cx, double cy, double w, double h, int line) {
  try {
    return BBox(cx, cy, w, h);
  } catch (std::invalid_argument const& e) {
    throw ValidationError("line " + std::to_string(line) + ": " + e.what());
  }
}

}  // namespace

Scenario parse_scenario(std::istream& in, int hit_count) {
  Scenario s;
  bool have_header = false;
  bool have_fps = false, have_image = false, have_target = false, have_patch = false;
  std::map<int, DetectionFrame> frames;
  std::map<int, std::map<std::string, int>> identity_line;

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto const hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto const toks = split_ws(raw);
    if (toks.empty()) continue;

    if (!have_header) {
      if (toks[0] != "mothijack-scenario") {
        throw ParseError("expected 'mothijack-scenario <version>' header", line);
      }
      expect_arity(toks, 2, line);
      int const version = parse_int(toks[1], line, "version");
      if (version != kScenarioFormatVersion) {
        throw ParseError("unsupported scenario format version " + std::to_string(version), line);
      }
      have_header = true;
      continue;
    }

    std::string const& key = toks[0];
    if (key == "name") {
      expect_arity(toks, 2, line);
      s.name = toks[1];
    } else if (key == "fps") {
      expect_arity(toks, 2, line);
      s.fps = parse_double(toks[1], line, "fps");
      have_fps = true;
    } else if (key == "image") {
      expect_arity(toks, 3, line);
      s.image_width = parse_double(toks[1], line, "image.width");
      s.image_height = parse_double(toks[2], line, "image.height");
      have_image = true;
    } else if (key == "target") {
      expect_arity(toks, 2, line);
      s.target_label = toks[1];
      have_target = true;
    } else if (key == "patch") {
      expect_arity(toks, 5, line);
      s.patch.bounds = make_box(parse_double(toks[1], line, "patch.cx"),
                                parse_double(toks[2], line, "patch.cy"),
                                parse_double(toks[3], line, "patch.w"),
                                parse_double(toks[4], line, "patch.h"), line);
      have_patch = true;
    } else if (key == "direction") {
      expect_arity(toks, 3, line);
      s.attack_direction = Vec2{parse_double(toks[1], line, "direction.dx"),
                                parse_double(toks[2], line, "direction.dy")};
    } else if (std::isdigit(static_cast<unsigned char>(key[0])) || key[0] == '-') {
      if (toks.size() != 7) {
        throw ParseError("detection record expects 7 fields (frame identity class cx cy w h), got " +
                             std::to_string(toks.size()),
                         line);
      }
      int const frame = parse_int(toks[0], line, "frame");
      if (frame < 0) throw ValidationError("line " + std::to_string(line) + ": negative frame index");
      LabeledBox rec{make_box(parse_double(toks[3], line, "cx"), parse_double(toks[4], line, "cy"),
                              parse_double(toks[5], line, "w"), parse_double(toks[6], line, "h"),
                              line),
                     toks[1], toks[2]};
      auto [it, inserted] = identity_line[frame].emplace(rec.identity, line);
      if (!inserted) {
        throw ValidationError("line " + std::to_string(line) + ": frame " + std::to_string(frame) +
                              ": duplicate identity '" + rec.identity + "' (first at line " +
                              std::to_string(it->second) + ")");
      }
      DetectionFrame& f = frames[frame];
      f.index = frame;
      f.boxes.push_back(std::move(rec));
    } else {
      throw ParseError("unknown key '" + key + "'", line);
    }
  }

  if (!have_header) throw ParseError("empty scenario (missing 'mothijack-scenario' header)", 0);
  if (!have_fps) throw ParseError("missing 'fps'", 0);
  if (!have_image) throw ParseError("missing 'image'", 0);
  if (!have_target) throw ParseError("missing 'target'", 0);
  if (!have_patch) throw ParseError("missing 'patch'", 0);

  int expected = 0;
  for (auto& [index, frame] : frames) {
    if (index != expected) {
      throw ValidationError("frame " + std::to_string(expected) +
                            " missing (frame indices must be consecutive from 0)");
    }
    s.frames.push_back(std::move(frame));
    ++expected;
  }
  s.validate(hit_count);
  return s;
}

Scenario load_scenario(std::filesystem::path const& path, int hit_count) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  return parse_scenario(in, hit_count);
}

void write_scenario(std::ostream& out, Scenario const& s) {
  out << "mothijack-scenario " << kScenarioFormatVersion << '\n';
  if (!s.name.empty()) out << "name " << s.name << '\n';
  out << "fps " << format_number(s.fps) << '\n';
  out << "image " << format_number(s.image_width) << ' ' << format_number(s.image_height) << '\n';
  out << "target " << s.target_label << '\n';
  BBox const& p = s.patch.bounds;
  out << "patch " << format_number(p.cx()) << ' ' << format_number(p.cy()) << ' '
      << format_number(p.w()) << ' ' << format_number(p.h()) << '\n';
  if (s.attack_direction) {
    out << "direction " << format_number(s.attack_direction->dx) << ' '
        << format_number(s.attack_direction->dy) << '\n';
  }
  out << "# frame identity class cx cy w h\n";
  for (auto const& f : s.frames) {
    for (auto const& b : f.boxes) {
      out << f.index << ' ' << b.identity << ' ' << b.label << ' ' << format_number(b.box.cx())
          << ' ' << format_number(b.box.cy()) << ' ' << format_number(b.box.w()) << ' '
          << format_number(b.box.h()) << '\n';
    }
  }
}

std::string to_text(Scenario const& s) {
  std::ostringstream os;
  write_scenario(os, s);
  return os.str();
}

void save_scenario(std::filesystem::path const& path, Scenario const& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_scenario(out, s);
}

BBox CameraModel::project(double lateral, double depth) const {
  double const u0 = 0.5 * width;
  double const v0 = 0.5 * height;
  double const cx = u0 + focal * lateral / depth;
  double const cy = v0 + focal * (mount_height - 0.5 * car_height) / depth;
  return BBox(cx, cy, focal * car_width / depth, focal * car_height / depth);
}

namespace {

constexpr char const* kTargetId = "target";

BBox jittered(BBox const& b, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return b;
  std::normal_distribution<double> n(0.0, sigma);
  double const cx = b.cx() + n(rng);
  double const cy = b.cy() + n(rng);
  double const w = std::max(1.0, b.w() + n(rng));
  double const h = std::max(1.0, b.h() + n(rng));
  return BBox(cx, cy, w, h);
}

Scenario single_target(std::string name, double fps, CameraModel const& cam,
                       std::vector<BBox> const& truth, double sigma, std::uint64_t seed) {
  Scenario s;
  s.name = std::move(name);
  s.fps = fps;
  s.image_width = cam.width;
  s.image_height = cam.height;
  s.target_label = kTargetId;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    DetectionFrame f;
    f.index = static_cast<int>(i);
    f.boxes.push_back({jittered(truth[i], sigma, rng), kTargetId, "car"});
    s.frames.push_back(std::move(f));
  }
  return s;
}

PatchRegion patch_around(BBox const& b, double scale) {
  return {BBox(b.cx(), b.cy(), scale * b.w(), scale * b.h())};
}

void require_frames(int frames, char const* who) {
  if (frames < 10) {
    throw std::invalid_argument(std::string(who) + ": at least 10 frames are required");
  }
}

}  // namespace

Scenario gen_move_in(MoveInParams const& p) {
  require_frames(p.frames, "gen_move_in");
  std::vector<BBox> truth;
  for (int t = 0; t < p.frames; ++t) {
    double const depth = p.start_depth - p.forward_speed * t / p.fps;
    if (depth <= 1.0) throw std::invalid_argument("gen_move_in: car passes the camera");
    truth.push_back(p.camera.project(p.lateral_offset, depth));
  }
  Scenario s = single_target("move-in", p.fps, p.camera, truth, p.sigma, p.seed);
  s.patch = patch_around(truth[std::clamp(p.patch_frame, 0, p.frames - 1)], p.patch_scale);
  s.attack_direction = Vec2{p.lateral_offset >= 0.0 ? -1.0 : 1.0, 0.0};
  return s;
}

Scenario gen_move_out(MoveOutParams const& p) {
  require_frames(p.frames, "gen_move_out");
  std::vector<BBox> truth;
  for (int t = 0; t < p.frames; ++t) {
    double const sec = t / p.fps;
    double const depth = p.start_depth + p.relative_speed * sec;
    if (depth <= 1.0) throw std::invalid_argument("gen_move_out: lead vehicle too close");
    double const lateral =
        p.lateral_offset + p.lateral_sway * std::sin(2.0 * std::numbers::pi * sec / p.sway_period);
    truth.push_back(p.camera.project(lateral, depth));
  }
  Scenario s = single_target("move-out", p.fps, p.camera, truth, p.sigma, p.seed);
  s.patch = patch_around(truth[std::clamp(p.patch_frame, 0, p.frames - 1)], p.patch_scale);
  s.attack_direction = Vec2{p.lateral_offset >= 0.0 ? 1.0 : -1.0, 0.0};
  return s;
}

namespace {

std::vector<BBox> line_truth(StraightLineParams const& p, int turn_frame, double turn_radians) {
  std::vector<BBox> truth;
  double x = p.start.dx;
  double y = p.start.dy;
  double const c = std::cos(turn_radians);
  double const sn = std::sin(turn_radians);
  Vec2 const turned{p.velocity.dx * c - p.velocity.dy * sn, p.velocity.dx * sn + p.velocity.dy * c};
  for (int t = 0; t < p.frames; ++t) {
    truth.emplace_back(x, y, p.width, p.height);
    Vec2 const v = t >= turn_frame ? turned : p.velocity;
    x += v.dx;
    y += v.dy;
  }
  return truth;
}

Scenario line_scenario(std::string name, StraightLineParams const& p,
                       std::vector<BBox> const& truth) {
  CameraModel cam;
  Scenario s = single_target(std::move(name), p.fps, cam, truth, p.sigma, p.seed);
  int const anchor = std::min(15, p.frames - 1);
  s.patch = patch_around(truth[anchor], 0.6);
  s.attack_direction = p.attack_direction;
  return s;
}

}  // namespace

Scenario gen_straight_line(StraightLineParams const& p) {
  require_frames(p.frames, "gen_straight_line");
  return line_scenario("straight-line", p, line_truth(p, p.frames, 0.0));
}

Scenario gen_heading_change(HeadingChangeParams const& p) {
  require_frames(p.line.frames, "gen_heading_change");
  return line_scenario("heading-change", p.line,
                       line_truth(p.line, p.turn_frame, p.turn_degrees * std::numbers::pi / 180.0));
}

Scenario with_jitter(Scenario const& s, double sigma, std::uint64_t seed) {
  if (sigma <= 0.0) return s;
  Scenario out = s;
  std::mt19937_64 rng(seed);
  for (auto& f : out.frames) {
    for (auto& b : f.boxes) b.box = jittered(b.box, sigma, rng);
  }
  return out;
}

}  // namespace mothijack
