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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mothijack/frame_log.hpp"
#include "mothijack/geometry.hpp"
#include "mothijack/scenarios.hpp"
#include "mothijack/tracking.hpp"

namespace mothijack {

/// Resolution of the placement search along the attack direction, pixels.
inline constexpr double kPlacementResolution = 0.1;
/// IoU above which a detection counts as the box a plan wants erased.
inline constexpr double kEraseMatchIou = 0.99;

struct AttackSpec {
  /// Track id to hijack. Empty: resolve from the scenario's target at
  /// `start_frame`.
  std::optional<int> target;
  Vec2 direction{1.0, 0.0};  // attacker-desired velocity direction
  PatchRegion patch{BBox(0.0, 0.0, 1.0, 1.0)};
  double gamma = 0.1;  // min IoU between fabricated box and patch
  int max_frames = 3;
  int start_frame = 15;
  /// Probability that the per-frame adversarial example works; failed frames
  /// still consume budget and feed clean detections.
  double ae_success_prob = 1.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument.
  void validate() const;

  /// Defaults with direction and patch taken from the scenario annotations.
  static AttackSpec for_scenario(Scenario const& s);
};

struct FabricationPlan {
  BBox erase;
  BBox fabricate;
  Vec2 shift;
  /// False when feasibility along the ray was not a single interval; the
  /// dense scan result is used either way.
  bool ray_monotone = true;
};

/// Largest shift along `direction` that keeps the detection associated with
/// the target's prediction (IoU >= iou_gate) while overlapping the patch
/// (IoU >= gamma). Throws Infeasible when no positive shift qualifies and
/// std::invalid_argument when the unshifted detection is outside the gate.
FabricationPlan find_pos(BBox const& predicted_target, BBox const& detection, Vec2 direction,
                         PatchRegion const& patch, double iou_gate, double gamma);

/// Detections after a fully successful per-frame adversarial example: the
/// planned erase box removed, the fabricated box appended, everything else
/// untouched. Throws TargetMissing.
std::vector<BBox> apply_idealized_ae(std::span<BBox const> detections, FabricationPlan const& plan);

enum class AttackStatus { kSucceeded, kBudgetExhausted, kInfeasible };

std::string_view to_string(AttackStatus s);

/// What happens after the attack stops.
struct PostAttackTrace {
  /// Clean frames during which the hijacked (or erased) track stayed alive.
  int ghost_frames = 0;
  bool ghost_deleted = false;  // false if the scenario ended first
  /// Clean frames during which the target's detection was not covered by a
  /// confirmed track.
  int blackout_frames = 0;
  bool target_reconfirmed = false;
  std::optional<int> recovered_track_id;
};

struct AttackResult {
  AttackStatus status = AttackStatus::kBudgetExhausted;
  int frames_attacked = 0;
  int target_track_id = 0;
  std::optional<int> hijacked_track_id;
  /// Velocity of the hijacked track right after the last attacked frame.
  std::optional<Vec2> hijacked_velocity;
  /// Every attacked frame's fabricated box was matched to the target track.
  bool hijack_held = true;
  PostAttackTrace trace;
  std::string message;

  bool success() const { return status == AttackStatus::kSucceeded; }
};

/// Tracker hijacking over the idealized AE channel. After every attacked
/// frame the next frame's clean target detection is probed against a
/// read-only view of the tracker; the attack succeeds once it no longer
/// associates with the target track. Frames after success run clean so the
/// post-attack trace can be recorded. `log`, if given, receives every frame.
AttackResult hijack(Scenario const& scenario, TrackerConfig const& config, AttackSpec const& spec,
                    FrameLog* log = nullptr);

struct EraseSpec {
  std::optional<int> target;
  int n_frames = 1;
  int start_frame = 15;
  double ae_success_prob = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Detection-erasure baseline: the target's detection is removed for
/// `n_frames` consecutive frames, then the same probe as `hijack` decides
/// success.
AttackResult erase_attack(Scenario const& scenario, TrackerConfig const& config,
                          EraseSpec const& spec, FrameLog* log = nullptr);

}  // namespace mothijack
