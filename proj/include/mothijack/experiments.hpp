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
#include <string_view>
#include <variant>
#include <vector>

#include "mothijack/attack.hpp"
#include "mothijack/scenarios.hpp"
#include "mothijack/tracking.hpp"

namespace mothijack {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class AttackKind { kHijack, kErase };

std::string_view to_string(AttackKind k);
/// Throws std::invalid_argument.
AttackKind attack_kind_from(std::string_view s);

/// A scenario that can be re-instantiated per trial. Generator sources get
/// the trial seed as their noise seed; file sources are jittered with
/// `file_sigma` (0 keeps every trial identical).
struct ScenarioSource {
  using Origin = std::variant<MoveInParams, MoveOutParams, StraightLineParams,
                              HeadingChangeParams, std::filesystem::path>;

  std::string id;
  Origin origin;
  double file_sigma = 0.0;

  Scenario instantiate(std::uint64_t trial_seed, int hit_count = 6) const;
};

/// 10 move-in and 10 move-out scenes with seeded geometry, 1 px detection
/// jitter.
std::vector<ScenarioSource> bundled_hijack_set();
/// Noise-free constant-velocity scenes.
std::vector<ScenarioSource> bundled_straight_lines();
/// Scenes with a mid-sequence turn and 0.5 px jitter.
std::vector<ScenarioSource> bundled_heading_changes();

/// "bundled", "move-in", "move-out", "straight-line", "heading-change".
/// Throws std::invalid_argument on an unknown name.
std::vector<ScenarioSource> scenario_set(std::string_view name);

/// Seed for one (scenario, trial) pair. Independent of cov, (R, H), kind and
/// k so every cell sees the same noise draws.
std::uint64_t trial_seed(std::uint64_t master, std::string_view scenario_id, int trial);

/// Smallest k for which hijack with max_frames = k succeeds. Throws
/// NoSuccess when nothing up to the end of the scenario works.
int min_frames(Scenario const& scenario, TrackerConfig const& config, AttackSpec spec);

/// Same scan for the erase baseline.
int min_erase_frames(Scenario const& scenario, TrackerConfig const& config, EraseSpec spec);

/// One attack run with exactly `k` attacked frames on a ready scenario.
AttackResult run_attack(Scenario const& scenario, TrackerConfig const& config, AttackKind kind,
                        int k, double ae_success_prob, std::uint64_t seed);

/// Fraction of (scenario x trial) runs succeeding with exactly k frames.
double success_rate(std::vector<ScenarioSource> const& scenarios, TrackerConfig const& config,
                    AttackKind kind, int k, int trials, std::uint64_t seed,
                    double ae_success_prob = 1.0);

/// Per-frame AE success rate an erase attack needs when it has to hold for
/// R consecutive frames, reported as (R - 1) / R.
double required_erase_reliability(int reserved_age);

struct TrackerPreset {
  int reserved_age = 60;
  int hit_count = 6;
  bool operator==(TrackerPreset const&) const = default;
};

struct SweepConfig {
  std::vector<std::string> scenario_sets{"bundled"};
  std::vector<std::filesystem::path> scenario_files;
  double file_sigma = 0.0;
  std::vector<double> cov_grid{0.001, 0.01, 0.1, 1.0, 10.0};
  std::vector<TrackerPreset> presets{{60, 6}, {5, 2}};
  std::vector<int> frames{1, 2, 3, 4, 5};
  std::vector<AttackKind> kinds{AttackKind::kHijack, AttackKind::kErase};
  double ae_success_prob = 1.0;
  int trials = 20;
  std::uint64_t seed = 1;
  int workers = 1;

  /// Throws ValidationError.
  void validate() const;
  std::vector<ScenarioSource> sources() const;
};

/// Scenario id used for the rows pooled over every scenario.
inline constexpr std::string_view kAllScenarios = "ALL";

struct ResultRow {
  std::string scenario;
  double cov = 0.0;
  int reserved_age = 0;
  int hit_count = 0;
  AttackKind kind = AttackKind::kHijack;
  int frames = 0;
  double success_rate = 0.0;
  /// Mean over trials of the smallest grid k that succeeded; empty when no
  /// trial succeeded anywhere on the grid.
  std::optional<double> mean_min_frames;
  int trials = 0;
  std::string error;

  std::string cell_id() const;
};

struct ResultTable {
  std::vector<ResultRow> rows;  // sorted by key, ALL rows last
  std::uint64_t seed = 0;
  std::string version{kToolVersion};

  /// Header plus one line per row, comma separated:
  /// scenario,cov,R,H,kind,frames,success_rate,mean_min_frames,trials,error
  void write_csv(std::ostream& out) const;
  /// gnuplot layout: one block per (kind, R, H, cov) series of the ALL rows,
  /// "frames success_rate" columns, blocks separated by two blank lines.
  void write_plot_data(std::ostream& out) const;
};

struct SweepOptions {
  /// Append-only JSON-lines log of finished cells. Cells already present
  /// are not recomputed.
  std::optional<std::filesystem::path> journal;
};

ResultTable run_sweep(SweepConfig const& cfg, SweepOptions const& opts = {});

/// Inverse of ResultTable::write_csv. Throws ParseError.
ResultTable read_result_table(std::istream& in);

}  // namespace mothijack
