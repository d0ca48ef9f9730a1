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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mothijack/experiments.hpp"

namespace mothijack {

/// One single-run attack, everything needed to reproduce it.
struct AttackRunConfig {
  /// Exactly one of `scenario` (a file) and `gen` (a generator or bundled
  /// scenario id) is set.
  std::optional<std::filesystem::path> scenario;
  std::optional<std::string> gen;
  std::uint64_t gen_seed = 1;
  AttackKind kind = AttackKind::kHijack;
  int frames = 3;
  double cov = 0.1;
  int reserved_age = 60;
  int hit_count = 6;
  double iou_gate = 0.3;
  double gamma = 0.1;
  int start_frame = 15;
  double ae_success_prob = 1.0;
  std::uint64_t seed = 0;
  std::optional<Vec2> direction;  // default: the scenario's annotation

  /// Throws ValidationError.
  void validate() const;
  TrackerConfig tracker() const;
};

/// Generator names accepted by `gen` besides bundled scenario ids.
std::span<std::string_view const> generator_names();

/// Scenario for a generator name or bundled id. Throws std::invalid_argument.
Scenario generate_scenario(std::string_view name, std::uint64_t seed);

/// Resolve the scenario an attack config points at.
Scenario resolve_scenario(AttackRunConfig const& cfg);

enum class KeyType {
  kNumber,
  kInteger,
  kUnsigned,
  kString,
  kPath,  // string, may be null
  kNumberList,
  kIntegerList,
  kStringList,
  kVec2,     // [dx, dy] or null
  kPresets,  // [[R, H], ...]
};

struct ConfigKey {
  std::string_view name;
  KeyType type;
  std::string_view help;
};

std::span<ConfigKey const> attack_config_keys();
std::span<ConfigKey const> sweep_config_keys();

/// Converts command-line tokens for `key` into its JSON value. Throws
/// ValidationError naming the key.
nlohmann::json flag_value_to_json(ConfigKey const& key, std::vector<std::string> const& tokens);

nlohmann::json to_json(AttackRunConfig const& cfg);
nlohmann::json to_json(SweepConfig const& cfg);

/// Missing keys keep their defaults; unknown keys and type mismatches throw
/// ValidationError with the offending field path, e.g. "cov[2]".
AttackRunConfig attack_config_from_json(nlohmann::json const& j);
SweepConfig sweep_config_from_json(nlohmann::json const& j);

/// Reads a JSON object from disk. Throws ParseError.
nlohmann::json load_json_file(std::filesystem::path const& path);

}  // namespace mothijack
