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

#include "mothijack/frame_log.hpp"

#include <ostream>

#include <json.hpp>

#include "mothijack/errors.hpp"

namespace mothijack {

namespace {

using nlohmann::json;

json box_json(BBox const& b) { return json::array({b.cx(), b.cy(), b.w(), b.h()}); }
json vec_json(Vec2 const& v) { return json::array({v.dx, v.dy}); }

BBox box_from(json const& j) {
  return BBox(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
              j.at(3).get<double>());
}

TrackStatus status_from(std::string const& s) {
  if (s == "tentative") return TrackStatus::kTentative;
  if (s == "confirmed") return TrackStatus::kConfirmed;
  if (s == "deleted") return TrackStatus::kDeleted;
  throw ParseError("unknown track status '" + s + "'", 0);
}

}  // namespace

void FrameLog::add(TrackSnapshot const& snap, std::optional<FrameAnnotation> const& note) {
  json j;
  j["frame"] = snap.frame;
  json tracks = json::array();
  for (auto const& t : snap.tracks) {
    tracks.push_back({{"id", t.id},
                      {"status", std::string(to_string(t.status))},
                      {"box", box_json(t.box)},
                      {"predicted", box_json(t.predicted)},
                      {"velocity", vec_json(t.velocity)},
                      {"hits", t.hits},
                      {"misses", t.misses}});
  }
  j["tracks"] = std::move(tracks);
  if (note) {
    json a;
    a["kind"] = note->kind;
    if (note->erased) a["erased"] = box_json(*note->erased);
    if (note->fabricated) a["fabricated"] = box_json(*note->fabricated);
    if (note->shift) a["shift"] = vec_json(*note->shift);
    a["ae_applied"] = note->ae_applied;
    j["attack"] = std::move(a);
  }
  lines_.push_back(j.dump());
}

void FrameLog::write(std::ostream& out) const {
  for (auto const& l : lines_) out << l << '\n';
}

TrackSnapshot parse_frame_line(std::string const& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (json::parse_error const& e) {
    throw ParseError(std::string("frame log: ") + e.what(), 0);
  }
  TrackSnapshot snap;
  snap.frame = j.at("frame").get<int>();
  for (auto const& t : j.at("tracks")) {
    TrackView v;
    v.id = t.at("id").get<int>();
    v.status = status_from(t.at("status").get<std::string>());
    v.box = box_from(t.at("box"));
    v.predicted = box_from(t.at("predicted"));
    v.velocity = {t.at("velocity").at(0).get<double>(), t.at("velocity").at(1).get<double>()};
    v.hits = t.at("hits").get<int>();
    v.misses = t.at("misses").get<int>();
    snap.tracks.push_back(v);
  }
  return snap;
}

}  // namespace mothijack
