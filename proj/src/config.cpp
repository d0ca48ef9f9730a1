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

#include "mothijack/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include "mothijack/errors.hpp"

namespace mothijack {

using nlohmann::json;

void AttackRunConfig::validate() const {
  if (scenario.has_value() == gen.has_value()) {
    throw ValidationError("config: exactly one of 'scenario' and 'gen' must be set");
  }
  if (frames < 1) throw ValidationError("config field 'frames': must be >= 1");
  if (start_frame < 1) throw ValidationError("config field 'start_frame': must be >= 1");
  try {
    tracker().validate();
  } catch (std::invalid_argument const& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("config field 'gamma': must lie in (0, 1]");
  if (!(ae_success_prob >= 0.0 && ae_success_prob <= 1.0)) {
    throw ValidationError("config field 'ae_success_prob': must lie in [0, 1]");
  }
  if (direction && (!direction->is_finite() || direction->norm() == 0.0)) {
    throw ValidationError("config field 'direction': must be finite and non-zero");
  }
}

TrackerConfig AttackRunConfig::tracker() const {
  TrackerConfig c;
  c.reserved_age = reserved_age;
  c.hit_count = hit_count;
  c.iou_gate = iou_gate;
  c.noise.cov = cov;
  return c;
}

namespace {

constexpr std::array<std::string_view, 4> kGenerators = {"move-in", "move-out", "straight-line",
                                                         "heading-change"};

}  // namespace

std::span<std::string_view const> generator_names() { return kGenerators; }

Scenario generate_scenario(std::string_view name, std::uint64_t seed) {
  if (name == "move-in") {
    MoveInParams p;
    p.seed = seed;
    return gen_move_in(p);
  }
  if (name == "move-out") {
    MoveOutParams p;
    p.seed = seed;
    return gen_move_out(p);
  }
  if (name == "straight-line") {
    StraightLineParams p;
    p.seed = seed;
    return gen_straight_line(p);
  }
  if (name == "heading-change") {
    HeadingChangeParams p;
    p.line.seed = seed;
    return gen_heading_change(p);
  }
  for (auto set : {"bundled", "straight-line", "heading-change"}) {
    for (auto const& src : scenario_set(set)) {
      if (src.id == name) return src.instantiate(seed);
    }
  }
  throw std::invalid_argument("unknown generator or bundled scenario '" + std::string(name) + "'");
}

Scenario resolve_scenario(AttackRunConfig const& cfg) {
  if (cfg.scenario) return load_scenario(*cfg.scenario, cfg.hit_count);
  try {
    Scenario s = generate_scenario(*cfg.gen, cfg.gen_seed);
    s.validate(cfg.hit_count);
    return s;
  } catch (std::invalid_argument const& e) {
    throw ValidationError(std::string("config field 'gen': ") + e.what());
  }
}

namespace {

constexpr std::array<ConfigKey, 14> kAttackKeys{{
    {"scenario", KeyType::kPath, "scenario file"},
    {"gen", KeyType::kPath, "generator name or bundled scenario id instead of a file"},
    {"gen_seed", KeyType::kUnsigned, "noise seed for the generator"},
    {"kind", KeyType::kString, "hijack or erase"},
    {"frames", KeyType::kInteger, "attacked frames (hijack budget or erase length)"},
    {"cov", KeyType::kNumber, "Kalman measurement noise scale"},
    {"reserved_age", KeyType::kInteger, "R, misses before a confirmed track is deleted"},
    {"hit_count", KeyType::kInteger, "H, hits before a track is confirmed"},
    {"iou_gate", KeyType::kNumber, "minimum IoU for association"},
    {"gamma", KeyType::kNumber, "minimum IoU between fabricated box and patch"},
    {"start_frame", KeyType::kInteger, "first attacked frame"},
    {"ae_success_prob", KeyType::kNumber, "per-frame adversarial example success probability"},
    {"seed", KeyType::kUnsigned, "seed for the per-frame success draws"},
    {"direction", KeyType::kVec2, "attack direction dx dy (default: from the scenario)"},
}};

constexpr std::array<ConfigKey, 11> kSweepKeys{{
    {"scenario_sets", KeyType::kStringList,
     "bundled, move-in, move-out, straight-line, heading-change"},
    {"scenario_files", KeyType::kStringList, "extra scenario files"},
    {"file_sigma", KeyType::kNumber, "per-trial jitter for scenario files, pixels"},
    {"cov", KeyType::kNumberList, "measurement noise grid"},
    {"presets", KeyType::kPresets, "R,H pairs, e.g. 60,6 5,2"},
    {"frames", KeyType::kIntegerList, "attacked-frames grid"},
    {"kinds", KeyType::kStringList, "hijack and/or erase"},
    {"ae_success_prob", KeyType::kNumber, "per-frame adversarial example success probability"},
    {"trials", KeyType::kInteger, "noise trials per scenario"},
    {"seed", KeyType::kUnsigned, "master seed"},
    {"workers", KeyType::kInteger, "worker threads"},
}};

[[noreturn]] void field_error(std::string const& path, std::string const& what) {
  throw ValidationError("config field '" + path + "': " + what);
}

template <class T>
T parse_token(std::string const& key, std::string const& tok) {
  T v{};
  auto const* end = tok.data() + tok.size();
  auto const [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) field_error(key, "cannot parse '" + tok + "'");
  return v;
}

double get_number(json const& j, std::string const& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  return j.get<double>();
}

int get_int(json const& j, std::string const& path) {
  if (!j.is_number_integer()) field_error(path, "expected an integer");
  return j.get<int>();
}

std::uint64_t get_unsigned(json const& j, std::string const& path) {
  if (!j.is_number_unsigned()) field_error(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string get_string(json const& j, std::string const& path) {
  if (!j.is_string()) field_error(path, "expected a string");
  return j.get<std::string>();
}

json const& get_array(json const& j, std::string const& path) {
  if (!j.is_array()) field_error(path, "expected an array");
  return j;
}

std::string idx(std::string const& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void check_keys(json const& j, std::span<ConfigKey const> keys) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  for (auto const& [k, v] : j.items()) {
    bool const known =
        std::any_of(keys.begin(), keys.end(), [&](ConfigKey const& c) { return c.name == k; });
    if (!known) field_error(k, "unknown key");
  }
}

json vec_json(Vec2 v) { return json::array({v.dx, v.dy}); }

}  // namespace

std::span<ConfigKey const> attack_config_keys() { return kAttackKeys; }
std::span<ConfigKey const> sweep_config_keys() { return kSweepKeys; }

json flag_value_to_json(ConfigKey const& key, std::vector<std::string> const& tokens) {
  std::string const name(key.name);
  auto one = [&]() -> std::string const& {
    if (tokens.size() != 1) field_error(name, "expected one value");
    return tokens.front();
  };
  switch (key.type) {
    case KeyType::kNumber:
      return parse_token<double>(name, one());
    case KeyType::kInteger:
      return parse_token<int>(name, one());
    case KeyType::kUnsigned:
      return parse_token<std::uint64_t>(name, one());
    case KeyType::kString:
    case KeyType::kPath:
      return one();
    case KeyType::kNumberList: {
      json a = json::array();
      for (auto const& t : tokens) a.push_back(parse_token<double>(name, t));
      return a;
    }
    case KeyType::kIntegerList: {
      json a = json::array();
      for (auto const& t : tokens) a.push_back(parse_token<int>(name, t));
      return a;
    }
    case KeyType::kStringList:
      return tokens;
    case KeyType::kVec2:
      if (tokens.size() != 2) field_error(name, "expected two values");
      return json::array({parse_token<double>(name, tokens[0]), parse_token<double>(name, tokens[1])});
    case KeyType::kPresets: {
      json a = json::array();
      for (auto const& t : tokens) {
        auto const comma = t.find(',');
        if (comma == std::string::npos) field_error(name, "expected R,H but got '" + t + "'");
        a.push_back(json::array({parse_token<int>(name, t.substr(0, comma)),
                                 parse_token<int>(name, t.substr(comma + 1))}));
      }
      return a;
    }
  }
  field_error(name, "unsupported key type");
}

json to_json(AttackRunConfig const& c) {
  json j;
  j["scenario"] = c.scenario ? json(c.scenario->string()) : json(nullptr);
  j["gen"] = c.gen ? json(*c.gen) : json(nullptr);
  j["gen_seed"] = c.gen_seed;
  j["kind"] = std::string(to_string(c.kind));
  j["frames"] = c.frames;
  j["cov"] = c.cov;
  j["reserved_age"] = c.reserved_age;
  j["hit_count"] = c.hit_count;
  j["iou_gate"] = c.iou_gate;
  j["gamma"] = c.gamma;
  j["start_frame"] = c.start_frame;
  j["ae_success_prob"] = c.ae_success_prob;
  j["seed"] = c.seed;
  j["direction"] = c.direction ? vec_json(*c.direction) : json(nullptr);
  return j;
}

json to_json(SweepConfig const& c) {
  json j;
  j["scenario_sets"] = c.scenario_sets;
  json files = json::array();
  for (auto const& f : c.scenario_files) files.push_back(f.string());
  j["scenario_files"] = std::move(files);
  j["file_sigma"] = c.file_sigma;
  j["cov"] = c.cov_grid;
  json presets = json::array();
  for (auto const& p : c.presets) presets.push_back(json::array({p.reserved_age, p.hit_count}));
  j["presets"] = std::move(presets);
  j["frames"] = c.frames;
  json kinds = json::array();
  for (auto k : c.kinds) kinds.push_back(std::string(to_string(k)));
  j["kinds"] = std::move(kinds);
  j["ae_success_prob"] = c.ae_success_prob;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  return j;
}

AttackRunConfig attack_config_from_json(json const& j) {
  check_keys(j, kAttackKeys);
  AttackRunConfig c;
  auto has = [&](char const* k) { return j.contains(k) && !j.at(k).is_null(); };
  if (has("scenario")) c.scenario = get_string(j.at("scenario"), "scenario");
  if (has("gen")) c.gen = get_string(j.at("gen"), "gen");
  if (has("gen_seed")) c.gen_seed = get_unsigned(j.at("gen_seed"), "gen_seed");
  if (has("kind")) {
    try {
      c.kind = attack_kind_from(get_string(j.at("kind"), "kind"));
    } catch (std::invalid_argument const& e) {
      field_error("kind", e.what());
    }
  }
  if (has("frames")) c.frames = get_int(j.at("frames"), "frames");
  if (has("cov")) c.cov = get_number(j.at("cov"), "cov");
  if (has("reserved_age")) c.reserved_age = get_int(j.at("reserved_age"), "reserved_age");
  if (has("hit_count")) c.hit_count = get_int(j.at("hit_count"), "hit_count");
  if (has("iou_gate")) c.iou_gate = get_number(j.at("iou_gate"), "iou_gate");
  if (has("gamma")) c.gamma = get_number(j.at("gamma"), "gamma");
  if (has("start_frame")) c.start_frame = get_int(j.at("start_frame"), "start_frame");
  if (has("ae_success_prob")) {
    c.ae_success_prob = get_number(j.at("ae_success_prob"), "ae_success_prob");
  }
  if (has("seed")) c.seed = get_unsigned(j.at("seed"), "seed");
  if (has("direction")) {
    json const& d = get_array(j.at("direction"), "direction");
    if (d.size() != 2) field_error("direction", "expected [dx, dy]");
    c.direction = Vec2{get_number(d[0], "direction[0]"), get_number(d[1], "direction[1]")};
  }
  c.validate();
  return c;
}

SweepConfig sweep_config_from_json(json const& j) {
  check_keys(j, kSweepKeys);
  SweepConfig c;
  if (j.contains("scenario_sets")) {
    c.scenario_sets.clear();
    json const& a = get_array(j.at("scenario_sets"), "scenario_sets");
    for (std::size_t i = 0; i < a.size(); ++i) {
      c.scenario_sets.push_back(get_string(a[i], idx("scenario_sets", i)));
    }
  }
  if (j.contains("scenario_files")) {
    json const& a = get_array(j.at("scenario_files"), "scenario_files");
    for (std::size_t i = 0; i < a.size(); ++i) {
      c.scenario_files.emplace_back(get_string(a[i], idx("scenario_files", i)));
    }
  }
  if (j.contains("file_sigma")) c.file_sigma = get_number(j.at("file_sigma"), "file_sigma");
  if (j.contains("cov")) {
    c.cov_grid.clear();
    json const& a = get_array(j.at("cov"), "cov");
    for (std::size_t i = 0; i < a.size(); ++i) c.cov_grid.push_back(get_number(a[i], idx("cov", i)));
  }
  if (j.contains("presets")) {
    c.presets.clear();
    json const& a = get_array(j.at("presets"), "presets");
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::string const p = idx("presets", i);
      json const& pair = get_array(a[i], p);
      if (pair.size() != 2) field_error(p, "expected [R, H]");
      c.presets.push_back({get_int(pair[0], p + "[0]"), get_int(pair[1], p + "[1]")});
    }
  }
  if (j.contains("frames")) {
    c.frames.clear();
    json const& a = get_array(j.at("frames"), "frames");
    for (std::size_t i = 0; i < a.size(); ++i) c.frames.push_back(get_int(a[i], idx("frames", i)));
  }
  if (j.contains("kinds")) {
    c.kinds.clear();
    json const& a = get_array(j.at("kinds"), "kinds");
    for (std::size_t i = 0; i < a.size(); ++i) {
      try {
        c.kinds.push_back(attack_kind_from(get_string(a[i], idx("kinds", i))));
      } catch (std::invalid_argument const& e) {
        field_error(idx("kinds", i), e.what());
      }
    }
  }
  if (j.contains("ae_success_prob")) {
    c.ae_success_prob = get_number(j.at("ae_success_prob"), "ae_success_prob");
  }
  if (j.contains("trials")) c.trials = get_int(j.at("trials"), "trials");
  if (j.contains("seed")) c.seed = get_unsigned(j.at("seed"), "seed");
  if (j.contains("workers")) c.workers = get_int(j.at("workers"), "workers");
  c.validate();
  return c;
}

json load_json_file(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  try {
    return json::parse(in);
  } catch (json::parse_error const& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

}  // namespace mothijack
