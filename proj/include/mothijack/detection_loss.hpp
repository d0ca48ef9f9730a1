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
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "mothijack/geometry.hpp"

namespace mothijack {

/// Pre-NMS detector candidate.
struct CandidateBox {
  BBox box;
  double confidence = 0.0;
  std::vector<double> class_probs;
};

/// Where (and as what) a box should be erased or fabricated.
struct FabricationTarget {
  Point2 center;
  double w = 1.0;
  double h = 1.0;
  std::size_t class_index = 0;
};

/// Floor applied to probabilities inside the cross-entropy.
inline constexpr double kProbFloor = 1e-12;

struct LossOptions {
  /// The erase term is implemented as printed: C^2 - CE(p, class). Setting
  /// this turns it into C^2 + CE(p, class): descent then raises the class
  /// probability instead of lowering it.
  bool flip_erase_ce_sign = false;
};

/// -log(max(p[c], 1e-12)).
double cross_entropy(std::span<double const> probs, std::size_t class_index);

/// Erase loss over candidates whose box contains target.center.
double l1_loss(std::span<CandidateBox const> candidates, FabricationTarget const& target,
               LossOptions const& opts = {});

/// Fabrication loss over candidates whose box contains target.center.
double l2_loss(std::span<CandidateBox const> candidates, FabricationTarget const& target);

/// l1(erase) + weight * l2(fabricate).
double total_loss(std::span<CandidateBox const> candidates, FabricationTarget const& erase_target,
                  FabricationTarget const& fab_target, double fab_weight,
                  LossOptions const& opts = {});

/// Fixed, seeded parameters of the differentiable stand-in detector.
///
/// Anchors sit on a 4x4 grid (32 px pitch, 40 px base boxes). Anchor k
/// reads its confidence logit from pixels {2k, 2k+1} only; its class logits
/// and box offsets read a seeded subset of pixels 32..63. Confidence pixels
/// are therefore private to each anchor, which makes the confidence of a
/// covering candidate move monotonically under erase-only descent.
struct ToyDetectorParams {
  static constexpr std::size_t kAnchors = 16;
  static constexpr std::size_t kClasses = 4;
  static constexpr std::size_t kPixels = 64;
  static constexpr std::size_t kSharedPixelsPerAnchor = 6;

  struct Anchor {
    BBox base{0.0, 0.0, 1.0, 1.0};
    std::vector<double> conf_weights;               // kPixels
    double conf_bias = 0.0;
    std::vector<std::vector<double>> class_weights;  // kClasses x kPixels
    std::vector<double> class_bias;                  // kClasses
    std::vector<double> dx, dy, dw, dh;              // kPixels each
  };

  std::vector<Anchor> anchors;

  static ToyDetectorParams seeded(std::uint64_t seed);
};

/// Patch perturbation plus the fixed scene mapping it to candidates.
struct ToyScene {
  std::shared_ptr<ToyDetectorParams const> params;
  std::vector<double> delta;  // kPixels entries in [-epsilon, epsilon]
  double epsilon = 1.0;

  static ToyScene make(std::uint64_t seed, double epsilon = 1.0);
  void validate() const;
};

std::vector<CandidateBox> toy_detect(ToyScene const& scene);

/// Analytic d(total_loss o toy_detect)/d(delta). The containment indicator
/// is treated as locally constant.
std::vector<double> total_loss_gradient(ToyScene const& scene, FabricationTarget const& erase_target,
                                        FabricationTarget const& fab_target, double fab_weight,
                                        LossOptions const& opts = {});

enum class PatchOptimizer { kBacktracking, kAdam };

struct OptimizeOptions {
  PatchOptimizer method = PatchOptimizer::kBacktracking;
  LossOptions loss;
  /// Backtracking gives up on a step once the step size falls below
  /// step_size * min_step_ratio.
  double min_step_ratio = 1e-12;
};

struct OptimizeResult {
  ToyScene scene;
  std::vector<double> loss_trace;  // loss before the first step, then after each step
  bool stalled = false;            // backtracking hit the step-size floor
};

/// Projected gradient descent on total_loss o toy_detect. With backtracking
/// the trace never increases. Throws NonDecreasing if the very first step
/// cannot lower the loss.
OptimizeResult optimize_patch(ToyScene const& scene, FabricationTarget const& erase_target,
                              FabricationTarget const& fab_target, double fab_weight, int steps,
                              double step_size, OptimizeOptions const& opts = {});

/// Two-column "step loss" text, one row per trace entry.
void write_loss_trace(std::ostream& out, std::span<double const> trace);

}  // namespace mothijack
