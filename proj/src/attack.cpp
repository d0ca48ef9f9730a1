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

#include "mothijack/attack.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mothijack/errors.hpp"

namespace mothijack {

std::string_view to_string(AttackStatus s) {
  switch (s) {
    case AttackStatus::kSucceeded:
      return "succeeded";
    case AttackStatus::kBudgetExhausted:
      return "budget_exhausted";
    case AttackStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

void AttackSpec::validate() const {
  if (!direction.is_finite() || direction.norm() == 0.0) {
    throw std::invalid_argument("AttackSpec: direction must be finite and non-zero");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("AttackSpec: gamma must lie in (0, 1]");
  }
  if (max_frames < 1) throw std::invalid_argument("AttackSpec: max_frames must be >= 1");
  if (start_frame < 1) throw std::invalid_argument("AttackSpec: start_frame must be >= 1");
  if (!(ae_success_prob >= 0.0 && ae_success_prob <= 1.0)) {
    throw std::invalid_argument("AttackSpec: ae_success_prob must lie in [0, 1]");
  }
}

AttackSpec AttackSpec::for_scenario(Scenario const& s) {
  AttackSpec spec;
  spec.patch = s.patch;
  if (s.attack_direction) spec.direction = *s.attack_direction;
  return spec;
}

void EraseSpec::validate() const {
  if (n_frames < 1) throw std::invalid_argument("EraseSpec: n_frames must be >= 1");
  if (start_frame < 1) throw std::invalid_argument("EraseSpec: start_frame must be >= 1");
  if (!(ae_success_prob >= 0.0 && ae_success_prob <= 1.0)) {
    throw std::invalid_argument("EraseSpec: ae_success_prob must lie in [0, 1]");
  }
}

FabricationPlan find_pos(BBox const& predicted_target, BBox const& detection, Vec2 direction,
                         PatchRegion const& patch, double iou_gate, double gamma) {
  double const len = direction.norm();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw std::invalid_argument("find_pos: direction must be non-zero");
  }
  if (!passes_gate(iou(detection, predicted_target), iou_gate)) {
    throw std::invalid_argument("find_pos: detection is not associated with the target track");
  }
  Vec2 const unit = direction * (1.0 / len);
  auto feasible = [&](double t) {
    BBox const moved = translate(detection, unit * t);
    return passes_gate(iou(moved, predicted_target), iou_gate) &&
           iou(moved, patch.bounds) >= gamma;
  };

  // Past this distance the shifted box overlaps neither the prediction nor
  // the patch, so both constraints fail.
  auto reach = [&](BBox const& other) {
    return std::hypot(other.cx() - detection.cx(), other.cy() - detection.cy()) + other.w() +
           other.h() + detection.w() + detection.h();
  };
  double const t_max = std::min(reach(predicted_target), reach(patch.bounds));
  auto const steps = static_cast<long>(std::ceil(t_max / kPlacementResolution));

  long last = -1;
  int segments = 0;
  bool prev = false;
  for (long k = 1; k <= steps; ++k) {
    bool const ok = feasible(k * kPlacementResolution);
    if (ok) {
      last = k;
      if (!prev) ++segments;
    }
    prev = ok;
  }
  if (last < 0) {
    throw Infeasible("find_pos: no shift along the direction keeps the association (IoU >= " +
                     std::to_string(iou_gate) + ") and overlaps the patch (IoU >= " +
                     std::to_string(gamma) + ")");
  }

  // Tighten inside the last grid cell; `lo` stays feasible throughout.
  double lo = last * kPlacementResolution;
  double hi = lo + kPlacementResolution;
  if (!feasible(hi)) {
    for (int i = 0; i < 40; ++i) {
      double const mid = 0.5 * (lo + hi);
      (feasible(mid) ? lo : hi) = mid;
    }
  }

  Vec2 const shift = unit * lo;
  return {detection, translate(detection, shift), shift, segments <= 1};
}

std::vector<BBox> apply_idealized_ae(std::span<BBox const> detections, FabricationPlan const& plan) {
  std::size_t best = detections.size();
  double best_iou = -1.0;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    double const v = iou(detections[i], plan.erase);
    if (v > best_iou) {
      best_iou = v;
      best = i;
    }
  }
  if (best == detections.size() || best_iou < kEraseMatchIou) {
    throw TargetMissing("apply_idealized_ae: box to erase not found among the detections");
  }
  std::vector<BBox> out;
  out.reserve(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (i != best) out.push_back(detections[i]);
  }
  out.push_back(plan.fabricate);
  return out;
}

namespace {

std::size_t target_index(DetectionFrame const& f, std::string const& label) {
  for (std::size_t i = 0; i < f.boxes.size(); ++i) {
    if (f.boxes[i].identity == label) return i;
  }
  throw TargetMissing("frame " + std::to_string(f.index) + ": target '" + label +
                      "' not detected");
}

/// Warms the tracker up on clean frames [0, start) and resolves the target
/// track, which must be confirmed by then.
int warm_up(TrackManager& mgr, Scenario const& s, int start, std::optional<int> target,
            FrameLog* log) {
  if (start >= static_cast<int>(s.frames.size()) - 1) {
    throw ValidationError("attack start frame " + std::to_string(start) +
                          " leaves no frame to attack and probe");
  }
  for (int f = 0; f < start; ++f) {
    auto const snap = mgr.step(s.frames[f].bboxes());
    if (log) log->add(snap);
  }
  int id = 0;
  if (target) {
    id = *target;
  } else {
    DetectionFrame const& first = s.frames[start];
    auto const boxes = first.bboxes();
    auto const found = mgr.find_track_of(boxes, target_index(first, s.target_label));
    if (!found) {
      throw ValidationError("target '" + s.target_label + "' is not tracked at frame " +
                            std::to_string(start));
    }
    id = *found;
  }
  Track const* t = mgr.find(id);
  if (t == nullptr || t->status != TrackStatus::kConfirmed) {
    throw ValidationError("target track " + std::to_string(id) +
                          " is not confirmed before the attack starts");
  }
  return id;
}

/// Success probe: does the clean target detection of `frame` still associate
/// with `target_track`? Read-only on the manager.
bool target_escaped(TrackManager const& mgr, Scenario const& s, int frame, int target_track) {
  DetectionFrame const& f = s.frames[frame];
  auto const boxes = f.bboxes();
  auto const id = mgr.find_track_of(boxes, target_index(f, s.target_label));
  return !id || *id != target_track;
}

bool is_confirmed(TrackManager const& mgr, int id) {
  Track const* t = mgr.find(id);
  return t != nullptr && t->status == TrackStatus::kConfirmed;
}

/// Runs clean frames from `first` and fills the post-attack trace. Stops
/// early once both effects are resolved unless a log wants every frame.
void trace_aftermath(TrackManager& mgr, Scenario const& s, int first, int ghost_track,
                     PostAttackTrace& trace, FrameLog* log) {
  bool ghost_done = false;
  for (int f = first; f < static_cast<int>(s.frames.size()); ++f) {
    DetectionFrame const& frame = s.frames[f];
    auto const snap = mgr.step(frame.bboxes());
    if (log) log->add(snap);

    if (!ghost_done) {
      if (mgr.find(ghost_track) != nullptr) {
        ++trace.ghost_frames;
      } else {
        ghost_done = true;
        trace.ghost_deleted = true;
      }
    }
    if (!trace.target_reconfirmed) {
      int const holder = snap.detection_track[target_index(frame, s.target_label)];
      if (holder != ghost_track && is_confirmed(mgr, holder)) {
        trace.target_reconfirmed = true;
        trace.recovered_track_id = holder;
      } else {
        ++trace.blackout_frames;
      }
    }
    if (ghost_done && trace.target_reconfirmed && log == nullptr) break;
  }
}

void run_clean(TrackManager& mgr, Scenario const& s, int first, FrameLog* log) {
  if (log == nullptr) return;
  for (int f = first; f < static_cast<int>(s.frames.size()); ++f) {
    log->add(mgr.step(s.frames[f].bboxes()));
  }
}

}  // namespace

AttackResult hijack(Scenario const& scenario, TrackerConfig const& config, AttackSpec const& spec,
                    FrameLog* log) {
  spec.validate();
  TrackManager mgr(config);
  AttackResult result;
  int const target = warm_up(mgr, scenario, spec.start_frame, spec.target, log);
  result.target_track_id = target;

  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution ae_works(spec.ae_success_prob);
  int const n_frames = static_cast<int>(scenario.frames.size());

  int f = spec.start_frame;
  for (;;) {
    if (result.frames_attacked == spec.max_frames || f + 1 >= n_frames) {
      result.status = AttackStatus::kBudgetExhausted;
      result.message = "target still associated after " + std::to_string(result.frames_attacked) +
                       " attacked frame(s)";
      break;
    }
    Track const* t = mgr.find(target);
    if (t == nullptr) {
      result.status = AttackStatus::kBudgetExhausted;
      result.message = "target track vanished during the attack";
      break;
    }
    DetectionFrame const& frame = scenario.frames[f];
    auto const clean = frame.bboxes();
    BBox const predicted = kf_predict(t->kf, config.noise).second;
    BBox const& truth = clean[target_index(frame, scenario.target_label)];

    FabricationPlan plan{truth, truth, {}};
    try {
      plan = find_pos(predicted, truth, spec.direction, spec.patch, config.iou_gate, spec.gamma);
    } catch (Infeasible const& e) {
      result.status = AttackStatus::kInfeasible;
      result.message = e.what();
      break;
    }

    bool const applied = ae_works(rng);
    std::vector<BBox> const fed = applied ? apply_idealized_ae(clean, plan) : clean;
    auto const snap = mgr.step(fed);
    ++result.frames_attacked;
    if (applied && snap.detection_track.back() != target) {
      result.hijack_held = false;
    }
    if (log) {
      log->add(snap, FrameAnnotation{"hijack", plan.erase, plan.fabricate, plan.shift, applied});
    }
    ++f;

    if (target_escaped(mgr, scenario, f, target)) {
      result.status = AttackStatus::kSucceeded;
      result.hijacked_track_id = target;
      if (Track const* h = mgr.find(target)) result.hijacked_velocity = velocity(h->kf);
      break;
    }
  }

  if (result.success()) {
    trace_aftermath(mgr, scenario, f, target, result.trace, log);
  } else {
    run_clean(mgr, scenario, f, log);
  }
  return result;
}

AttackResult erase_attack(Scenario const& scenario, TrackerConfig const& config,
                          EraseSpec const& spec, FrameLog* log) {
  spec.validate();
  TrackManager mgr(config);
  AttackResult result;
  int const target = warm_up(mgr, scenario, spec.start_frame, spec.target, log);
  result.target_track_id = target;

  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution ae_works(spec.ae_success_prob);
  int const n_frames = static_cast<int>(scenario.frames.size());

  int f = spec.start_frame;
  for (; result.frames_attacked < spec.n_frames && f + 1 < n_frames; ++f) {
    DetectionFrame const& frame = scenario.frames[f];
    auto clean = frame.bboxes();
    std::size_t const idx = target_index(frame, scenario.target_label);
    BBox const erased = clean[idx];
    bool const applied = ae_works(rng);
    if (applied) clean.erase(clean.begin() + static_cast<std::ptrdiff_t>(idx));
    auto const snap = mgr.step(clean);
    ++result.frames_attacked;
    if (log) log->add(snap, FrameAnnotation{"erase", erased, std::nullopt, std::nullopt, applied});
  }

  if (result.frames_attacked < spec.n_frames) {
    result.status = AttackStatus::kBudgetExhausted;
    result.message = "scenario too short for the erase window";
    run_clean(mgr, scenario, f, log);
    return result;
  }
  if (target_escaped(mgr, scenario, f, target)) {
    result.status = AttackStatus::kSucceeded;
    trace_aftermath(mgr, scenario, f, target, result.trace, log);
  } else {
    result.status = AttackStatus::kBudgetExhausted;
    result.message = "recovered detection re-associated with track " + std::to_string(target);
    run_clean(mgr, scenario, f, log);
  }
  return result;
}

}  // namespace mothijack
