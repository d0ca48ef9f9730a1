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

#include "mothijack/detection_loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "mothijack/errors.hpp"
#include "mothijack/scenarios.hpp"

namespace mothijack {

double cross_entropy(std::span<double const> probs, std::size_t class_index) {
  return -std::log(std::max(probs[class_index], kProbFloor));
}

double l1_loss(std::span<CandidateBox const> candidates, FabricationTarget const& target,
               LossOptions const& opts) {
  double const sign = opts.flip_erase_ce_sign ? 1.0 : -1.0;
  double sum = 0.0;
  for (auto const& c : candidates) {
    if (!contains_center(c.box, target.center)) continue;
    sum += c.confidence * c.confidence + sign * cross_entropy(c.class_probs, target.class_index);
  }
  return sum;
}

double l2_loss(std::span<CandidateBox const> candidates, FabricationTarget const& target) {
  double sum = 0.0;
  for (auto const& c : candidates) {
    if (!contains_center(c.box, target.center)) continue;
    double const dx = c.box.cx() - target.center.x;
    double const dy = c.box.cy() - target.center.y;
    double const sw = std::sqrt(c.box.w()) - std::sqrt(target.w);
    double const sh = std::sqrt(c.box.h()) - std::sqrt(target.h);
    double const miss = 1.0 - c.confidence;
    sum += (dx * dx + dy * dy) + (sw * sw + sh * sh) + miss * miss +
           cross_entropy(c.class_probs, target.class_index);
  }
  return sum;
}

double total_loss(std::span<CandidateBox const> candidates, FabricationTarget const& erase_target,
                  FabricationTarget const& fab_target, double fab_weight,
                  LossOptions const& opts) {
  return l1_loss(candidates, erase_target, opts) + fab_weight * l2_loss(candidates, fab_target);
}

ToyDetectorParams ToyDetectorParams::seeded(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  ToyDetectorParams p;
  p.anchors.resize(kAnchors);
  std::vector<std::size_t> shared(kPixels / 2);
  std::iota(shared.begin(), shared.end(), kPixels / 2);

  for (std::size_t k = 0; k < kAnchors; ++k) {
    Anchor& a = p.anchors[k];
    double const gx = 16.0 + 32.0 * static_cast<double>(k % 4);
    double const gy = 16.0 + 32.0 * static_cast<double>(k / 4);
    a.base = BBox(gx, gy, 40.0, 40.0);

    a.conf_weights.assign(kPixels, 0.0);
    for (std::size_t j = 0; j < 2; ++j) {
      double const mag = 1.0 + uni(rng);
      a.conf_weights[2 * k + j] = uni(rng) < 0.5 ? -mag : mag;
    }
    a.conf_bias = 0.5 + 1.5 * uni(rng);

    a.class_weights.assign(kClasses, std::vector<double>(kPixels, 0.0));
    a.class_bias.resize(kClasses);
    for (auto& b : a.class_bias) b = gauss(rng);
    a.dx.assign(kPixels, 0.0);
    a.dy.assign(kPixels, 0.0);
    a.dw.assign(kPixels, 0.0);
    a.dh.assign(kPixels, 0.0);

    std::shuffle(shared.begin(), shared.end(), rng);
    for (std::size_t j = 0; j < kSharedPixelsPerAnchor; ++j) {
      std::size_t const px = shared[j];
      for (std::size_t c = 0; c < kClasses; ++c) a.class_weights[c][px] = gauss(rng);
      a.dx[px] = 2.0 * gauss(rng);
      a.dy[px] = 2.0 * gauss(rng);
      a.dw[px] = gauss(rng);
      a.dh[px] = gauss(rng);
    }
  }
  return p;
}

ToyScene ToyScene::make(std::uint64_t seed, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("ToyScene: epsilon must be positive");
  ToyScene s;
  s.params = std::make_shared<ToyDetectorParams const>(ToyDetectorParams::seeded(seed));
  s.delta.assign(ToyDetectorParams::kPixels, 0.0);
  s.epsilon = epsilon;
  return s;
}

void ToyScene::validate() const {
  if (!params) throw std::invalid_argument("ToyScene: missing detector parameters");
  if (delta.size() != ToyDetectorParams::kPixels) {
    throw std::invalid_argument("ToyScene: delta must have 64 entries");
  }
  for (double d : delta) {
    if (!(std::abs(d) <= epsilon)) throw std::invalid_argument("ToyScene: delta out of bounds");
  }
}

namespace {

double dot(std::vector<double> const& a, std::vector<double> const& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> softmax(std::vector<double> z) {
  double const m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (auto& v : z) v /= sum;
  return z;
}

CandidateBox evaluate(ToyDetectorParams::Anchor const& a, std::vector<double> const& delta) {
  std::vector<double> logits(a.class_bias);
  for (std::size_t c = 0; c < logits.size(); ++c) logits[c] += dot(a.class_weights[c], delta);
  return {BBox(a.base.cx() + dot(a.dx, delta), a.base.cy() + dot(a.dy, delta),
               a.base.w() + dot(a.dw, delta), a.base.h() + dot(a.dh, delta)),
          sigmoid(dot(a.conf_weights, delta) + a.conf_bias), softmax(std::move(logits))};
}

// d(-log p_c)/d(logits) = p - e_c, zero once p_c is below the clamp.
void add_ce_grad(std::vector<double>& dlogits, std::vector<double> const& p, std::size_t c,
                 double scale) {
  if (p[c] <= kProbFloor) return;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dlogits[i] += scale * (p[i] - (i == c ? 1.0 : 0.0));
  }
}

std::vector<double> project(std::vector<double> d, double eps) {
  for (auto& v : d) v = std::clamp(v, -eps, eps);
  return d;
}

double scene_loss(ToyScene const& s, FabricationTarget const& erase, FabricationTarget const& fab,
                  double weight, LossOptions const& opts) {
  auto const cands = toy_detect(s);
  return total_loss(cands, erase, fab, weight, opts);
}

}  // namespace

std::vector<CandidateBox> toy_detect(ToyScene const& scene) {
  scene.validate();
  std::vector<CandidateBox> out;
  out.reserve(scene.params->anchors.size());
  for (auto const& a : scene.params->anchors) out.push_back(evaluate(a, scene.delta));
  return out;
}

std::vector<double> total_loss_gradient(ToyScene const& scene, FabricationTarget const& erase_target,
                                        FabricationTarget const& fab_target, double fab_weight,
                                        LossOptions const& opts) {
  scene.validate();
  std::vector<double> grad(ToyDetectorParams::kPixels, 0.0);
  double const erase_sign = opts.flip_erase_ce_sign ? 1.0 : -1.0;

  for (auto const& a : scene.params->anchors) {
    CandidateBox const c = evaluate(a, scene.delta);
    double d_conf = 0.0;
    std::vector<double> d_logits(ToyDetectorParams::kClasses, 0.0);
    double d_cx = 0.0, d_cy = 0.0, d_w = 0.0, d_h = 0.0;

    if (contains_center(c.box, erase_target.center)) {
      d_conf += 2.0 * c.confidence;
      add_ce_grad(d_logits, c.class_probs, erase_target.class_index, erase_sign);
    }
    if (fab_weight != 0.0 && contains_center(c.box, fab_target.center)) {
      d_cx += fab_weight * 2.0 * (c.box.cx() - fab_target.center.x);
      d_cy += fab_weight * 2.0 * (c.box.cy() - fab_target.center.y);
      double const sw = std::sqrt(c.box.w());
      double const sh = std::sqrt(c.box.h());
      d_w += fab_weight * (sw - std::sqrt(fab_target.w)) / sw;
      d_h += fab_weight * (sh - std::sqrt(fab_target.h)) / sh;
      d_conf += fab_weight * -2.0 * (1.0 - c.confidence);
      add_ce_grad(d_logits, c.class_probs, fab_target.class_index, fab_weight);
    }

    double const d_conf_logit = d_conf * c.confidence * (1.0 - c.confidence);
    for (std::size_t px = 0; px < grad.size(); ++px) {
      double g = d_conf_logit * a.conf_weights[px] + d_cx * a.dx[px] + d_cy * a.dy[px] +
                 d_w * a.dw[px] + d_h * a.dh[px];
      for (std::size_t k = 0; k < d_logits.size(); ++k) g += d_logits[k] * a.class_weights[k][px];
      grad[px] += g;
    }
  }
  return grad;
}

OptimizeResult optimize_patch(ToyScene const& scene, FabricationTarget const& erase_target,
                              FabricationTarget const& fab_target, double fab_weight, int steps,
                              double step_size, OptimizeOptions const& opts) {
  if (steps < 1) throw std::invalid_argument("optimize_patch: steps must be >= 1");
  if (!(step_size > 0.0)) throw std::invalid_argument("optimize_patch: step_size must be positive");
  scene.validate();

  OptimizeResult res{scene, {}, false};
  double loss = scene_loss(res.scene, erase_target, fab_target, fab_weight, opts.loss);
  res.loss_trace.push_back(loss);

  if (opts.method == PatchOptimizer::kAdam) {
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    std::vector<double> m(scene.delta.size(), 0.0), v(scene.delta.size(), 0.0);
    for (int it = 1; it <= steps; ++it) {
      auto const g =
          total_loss_gradient(res.scene, erase_target, fab_target, fab_weight, opts.loss);
      double const c1 = 1.0 - std::pow(kBeta1, it);
      double const c2 = 1.0 - std::pow(kBeta2, it);
      for (std::size_t i = 0; i < g.size(); ++i) {
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
        res.scene.delta[i] -= step_size * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEps);
      }
      res.scene.delta = project(std::move(res.scene.delta), res.scene.epsilon);
      res.loss_trace.push_back(
          scene_loss(res.scene, erase_target, fab_target, fab_weight, opts.loss));
    }
    return res;
  }

  double eta = step_size;
  double const floor = step_size * opts.min_step_ratio;
  for (int it = 0; it < steps; ++it) {
    auto const g = total_loss_gradient(res.scene, erase_target, fab_target, fab_weight, opts.loss);
    bool accepted = false;
    bool moved = false;
    while (eta >= floor) {
      ToyScene trial = res.scene;
      for (std::size_t i = 0; i < g.size(); ++i) trial.delta[i] -= eta * g[i];
      trial.delta = project(std::move(trial.delta), trial.epsilon);
      if (trial.delta == res.scene.delta) break;  // projected gradient vanished
      moved = true;
      double const next = scene_loss(trial, erase_target, fab_target, fab_weight, opts.loss);
      if (next <= loss) {
        res.scene = std::move(trial);
        loss = next;
        accepted = true;
        eta = std::min(step_size, 2.0 * eta);
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      if (moved && it == 0) {
        throw NonDecreasing("optimize_patch: loss did not decrease down to the step-size floor");
      }
      res.stalled = moved;
      break;
    }
    res.loss_trace.push_back(loss);
  }
  return res;
}

void write_loss_trace(std::ostream& out, std::span<double const> trace) {
  out << "# step loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << i << ' ' << format_number(trace[i]) << '\n';
  }
}

}  // namespace mothijack
