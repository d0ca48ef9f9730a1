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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../tools/cli.hpp"
#include "mothijack/assignment.hpp"
#include "mothijack/attack.hpp"
#include "mothijack/detection_loss.hpp"
#include "mothijack/errors.hpp"
#include "mothijack/estimation.hpp"
#include "mothijack/experiments.hpp"
#include "mothijack/tracking.hpp"

using namespace mothijack;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(char const* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- 1

double brute_force_min(CostMatrix const& m) {
  bool const transpose = m.rows() > m.cols();
  std::size_t const n = transpose ? m.cols() : m.rows();
  std::size_t const big = transpose ? m.rows() : m.cols();
  std::vector<std::size_t> perm(big);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += transpose ? m(perm[i], i) : m(i, perm[i]);
    best = std::min(best, sum);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Verdict hungarian_oracle() {
  auto const t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(1, 7);
  // Costs on a 2^-20 lattice keep every partial sum exact.
  std::uniform_int_distribution<int> cell(0, 1 << 20);
  int mismatches = 0;
  for (int t = 0; t < 500; ++t) {
    CostMatrix m(dim(rng), dim(rng));
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = std::ldexp(cell(rng), -20);
    }
    auto const matching = hungarian_solve(m);
    double const got = total_cost(m, matching);
    if (matching.size() != std::min(m.rows(), m.cols()) || got != brute_force_min(m)) ++mismatches;
  }
  double const secs = seconds_since(t0);
  return {mismatches == 0 && secs < 5.0,
          fmt("%d/500 mismatches, %.3f s (limit 5 s)", mismatches, secs)};
}

// ---------------------------------------------------------------- 2

Verdict kalman_limits() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(50, 600), size(20, 120), off(-15, 15);
  double worst_trust = 0, worst_ignore = 0;
  for (int t = 0; t < 100; ++t) {
    BBox const first(pos(rng), pos(rng), size(rng), size(rng));
    for (double cov : {0.0, 1e9}) {
      NoiseConfig n;
      n.cov = cov;
      KalmanState s = kf_init(first, n);
      for (int step = 0; step < 3; ++step) {
        s = kf_update(kf_predict(s, n).first, translate(first, {4.0 * step, 1.0 * step}), n);
      }
      auto const [prior, prior_box] = kf_predict(s, n);
      BBox const z(prior_box.cx() + off(rng), prior_box.cy() + off(rng),
                   prior_box.w() + off(rng) / 3, prior_box.h() + off(rng) / 3);
      BBox const post = kf_update(prior, z, n).box();
      BBox const& ref = cov == 0.0 ? z : prior_box;
      double const err = std::max({std::abs(post.cx() - ref.cx()), std::abs(post.cy() - ref.cy()),
                                   std::abs(post.w() - ref.w()), std::abs(post.h() - ref.h())});
      (cov == 0.0 ? worst_trust : worst_ignore) = std::max(cov == 0.0 ? worst_trust : worst_ignore, err);
    }
  }
  return {worst_trust <= 1e-9 && worst_ignore <= 1e-3,
          fmt("cov=0 max |post-z| %.2e (limit 1e-9), cov=1e9 max |post-prior| %.2e (limit 1e-3)",
              worst_trust, worst_ignore)};
}

// ---------------------------------------------------------------- 3

// Returns (matches before confirmation, misses until deletion).
std::pair<int, int> lifecycle(TrackerConfig const& cfg) {
  TrackManager tm(cfg);
  std::vector<BBox> d{BBox(200, 200, 60, 40)};
  int confirm_hits = -1;
  for (int f = 0; f < 100 && confirm_hits < 0; ++f) {
    tm.step(d);
    if (tm.find(1)->status == TrackStatus::kConfirmed) confirm_hits = tm.find(1)->total_hits;
    d[0] = translate(d[0], {2, 0});
  }
  int misses = 0;
  while (tm.find(1) && misses < 1000) {
    tm.step({});
    ++misses;
  }
  return {confirm_hits, misses};
}

Verdict lifecycle_thresholds() {
  auto const [h30, r30] = lifecycle(TrackerConfig::for_fps(30));
  auto const [h5, r5] = lifecycle(TrackerConfig::short_memory());
  bool const pass = h30 == 6 && r30 == 60 && h5 == 2 && r5 == 5;
  return {pass, fmt("fps 30: confirmed after %d hits, deleted after %d misses (want 6, 60); "
                    "R=5 H=2: %d hits, %d misses (want 2, 5)",
                    h30, r30, h5, r5)};
}

// ---------------------------------------------------------------- 4, 9

struct MinFrameStats {
  double mean = 0;
  int max = 0;
  int count = 0;
  int failures = 0;
};

MinFrameStats min_frame_stats(std::vector<ScenarioSource> const& set, double cov, int trials,
                              std::uint64_t seed) {
  TrackerConfig tc;
  tc.noise.cov = cov;
  MinFrameStats st;
  double sum = 0;
  for (auto const& src : set) {
    for (int t = 0; t < trials; ++t) {
      std::uint64_t const ts = trial_seed(seed, src.id, t);
      Scenario const s = src.instantiate(ts, tc.hit_count);
      try {
        int const k = min_frames(s, tc, AttackSpec::for_scenario(s));
        sum += k;
        st.max = std::max(st.max, k);
        ++st.count;
      } catch (NoSuccess const&) {
        ++st.failures;
      }
    }
  }
  st.mean = st.count ? sum / st.count : 0.0;
  return st;
}

Verdict hijack_efficiency() {
  auto const set = bundled_hijack_set();
  double sum = 0;
  int count = 0, max = 0, failures = 0;
  std::string per_cov;
  for (double cov : {0.01, 0.1, 1.0, 10.0}) {
    MinFrameStats const st = min_frame_stats(set, cov, 5, 1);
    sum += st.mean * st.count;
    count += st.count;
    failures += st.failures;
    max = std::max(max, st.max);
    per_cov += fmt(" cov=%g:%.2f", cov, st.mean);
  }
  double const mean = count ? sum / count : 0.0;
  return {failures == 0 && mean <= 3.0 && max <= 5,
          fmt("mean min_frames %.3f (limit 3), max %d (limit 5), %d runs without success;", mean,
              max, failures) +
              per_cov};
}

Verdict move_in_vs_move_out() {
  MinFrameStats const in = min_frame_stats(scenario_set("move-in"), 0.1, 20, 1);
  MinFrameStats const out = min_frame_stats(scenario_set("move-out"), 0.1, 20, 1);
  return {in.failures == 0 && out.failures == 0 && in.mean <= out.mean,
          fmt("move-in mean %.3f (%d runs), move-out mean %.3f (%d runs)", in.mean, in.count,
              out.mean, out.count)};
}

// ---------------------------------------------------------------- 5

Verdict one_frame_ordering() {
  auto const set = bundled_hijack_set();
  TrackerConfig lo, hi;
  lo.noise.cov = 0.01;
  hi.noise.cov = 0.1;
  double const r_lo = success_rate(set, lo, AttackKind::kHijack, 1, 20, 1);
  double const r_hi = success_rate(set, hi, AttackKind::kHijack, 1, 20, 1);
  return {r_hi > r_lo, fmt("one-frame success cov=0.1: %.4f, cov=0.01: %.4f (need strictly greater)",
                           r_hi, r_lo)};
}

// ---------------------------------------------------------------- 6

Verdict baseline_gap() {
  auto const t0 = Clock::now();
  SweepConfig hij;
  hij.scenario_sets = {"bundled"};
  hij.cov_grid = {0.1};
  hij.presets = {{60, 6}};
  hij.frames = {3};
  hij.kinds = {AttackKind::kHijack};
  hij.trials = 20;

  SweepConfig er = hij;
  er.scenario_sets = {"straight-line"};
  er.kinds = {AttackKind::kErase};
  er.frames.clear();
  for (int k = 1; k <= 60; ++k) er.frames.push_back(k);

  ResultTable const th = run_sweep(hij);
  ResultTable const te = run_sweep(er);
  double const secs = seconds_since(t0);

  double const hijack3 = th.rows.back().success_rate;
  double worst_early = 0, at60 = 0;
  int worst_k = 0;
  for (auto const& r : te.rows) {
    if (r.scenario != kAllScenarios) continue;
    if (r.frames < 60 && r.success_rate >= worst_early) {
      worst_early = r.success_rate;
      worst_k = r.frames;
    }
    if (r.frames == 60) at60 = r.success_rate;
  }
  return {hijack3 >= 0.95 && worst_early <= 0.30 && at60 == 1.0 && secs < 60.0,
          fmt("hijack k=3: %.3f (need >= 0.95); erase max over k<60: %.3f at k=%d (limit 0.30); "
              "erase k=60: %.3f (need 1); %.2f s (limit 60 s)",
              hijack3, worst_early, worst_k, at60, secs)};
}

// ---------------------------------------------------------------- 7

Verdict persistence() {
  int successes = 0, bad = 0;
  std::string first_bad;
  for (TrackerPreset p : {TrackerPreset{60, 6}, TrackerPreset{5, 2}}) {
    TrackerConfig tc;
    tc.reserved_age = p.reserved_age;
    tc.hit_count = p.hit_count;
    for (auto const& src : bundled_hijack_set()) {
      for (int t = 0; t < 5; ++t) {
        std::uint64_t const ts = trial_seed(1, src.id, t);
        Scenario const s = src.instantiate(ts, tc.hit_count);
        for (int k : {1, 3, 5}) {
          AttackResult const r = run_attack(s, tc, AttackKind::kHijack, k, 1.0, ts);
          if (!r.success()) continue;
          ++successes;
          auto const& tr = r.trace;
          bool const ok = tr.ghost_deleted && tr.ghost_frames >= p.reserved_age - 1 &&
                          tr.ghost_frames <= p.reserved_age && tr.target_reconfirmed &&
                          tr.blackout_frames == p.hit_count;
          if (!ok) {
            ++bad;
            if (first_bad.empty()) {
              first_bad = fmt(" first: %s R=%d k=%d ghost %d blackout %d", src.id.c_str(),
                              p.reserved_age, k, tr.ghost_frames, tr.blackout_frames);
            }
          }
        }
      }
    }
  }
  return {successes > 0 && bad == 0,
          fmt("%d successful hijacks checked, %d outside ghost [R-1, R] / blackout == H", successes,
              bad) +
              first_bad};
}

// ---------------------------------------------------------------- 8

Verdict gradient_check() {
  FabricationTarget const erase{{48, 48}, 40, 40, 1}, fab{{83, 46}, 42, 38, 2};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    ToyScene s = ToyScene::make(1);
    for (auto& d : s.delta) d = u(rng);
    auto const g = total_loss_gradient(s, erase, fab, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ToyScene a = s, b = s;
      a.delta[i] += 1e-5;
      b.delta[i] -= 1e-5;
      double const fd =
          (total_loss(toy_detect(a), erase, fab, 1.0) - total_loss(toy_detect(b), erase, fab, 1.0)) / 2e-5;
      worst = std::max(worst, std::abs(fd - g[i]) / std::max({1.0, std::abs(fd), std::abs(g[i])}));
    }
  }
  auto const r = optimize_patch(ToyScene::make(1), erase, fab, 1.0, 500, 0.05);
  double worst_rise = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < r.loss_trace.size(); ++i) {
    worst_rise = std::max(worst_rise, r.loss_trace[i] - r.loss_trace[i - 1]);
  }
  return {worst < 1e-4 && worst_rise <= 1e-9,
          fmt("max relative gradient error %.2e (limit 1e-4); largest trace step %.3e over %zu "
              "steps (limit +1e-9), loss %.4f -> %.4f",
              worst, worst_rise, r.loss_trace.size() - 1, r.loss_trace.front(), r.loss_trace.back())};
}

// ---------------------------------------------------------------- 10

std::string slurp(fs::path const& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs `args`, snapshots every output file, replays the manifest into the
// same directory and compares byte for byte.
std::string replay_diff(std::vector<std::string> const& args, fs::path const& dir) {
  std::ostringstream sink;
  if (int rc = cli::run(args, sink, sink); rc != 0) return "run exited " + std::to_string(rc);
  std::vector<std::pair<fs::path, std::string>> before;
  for (auto const& e : fs::directory_iterator(dir)) before.emplace_back(e.path(), slurp(e.path()));
  if (int rc = cli::run({"replay", (dir / "manifest.json").string()}, sink, sink); rc != 0) {
    return "replay exited " + std::to_string(rc);
  }
  std::size_t files = 0;
  for (auto const& e : fs::directory_iterator(dir)) {
    ++files;
    (void)e;
  }
  if (files != before.size()) return "file set changed";
  for (auto const& [p, text] : before) {
    if (slurp(p) != text) return p.filename().string() + " differs";
  }
  return "";
}

Verdict reproducibility() {
  fs::path const root = fs::temp_directory_path() / "mothijack_acceptance";
  fs::remove_all(root);
  std::vector<std::pair<std::string, std::vector<std::string>>> const runs{
      {"attack hijack", {"attack", "--gen", "move-in-04", "--cov", "1", "--seed", "5"}},
      {"attack erase", {"attack", "--gen", "move-out", "--kind", "erase", "--frames", "60",
                        "--ae-success-prob", "0.99", "--seed", "3"}},
      {"sweep", {"sweep", "--scenario-sets", "move-in", "straight-line", "--cov", "0.1", "10",
                 "--frames", "1", "3", "60", "--trials", "2", "--workers", "3"}},
  };
  std::string failures;
  int i = 0;
  for (auto const& [name, args] : runs) {
    fs::path const dir = root / std::to_string(i++);
    auto full = args;
    full.push_back("--out-dir");
    full.push_back(dir.string());
    if (std::string const d = replay_diff(full, dir); !d.empty()) failures += " " + name + ": " + d;
  }
  fs::remove_all(root);
  return {failures.empty(),
          failures.empty() ? "2 attacks and 1 sweep replayed from their manifests byte-identical"
                           : "mismatch:" + failures};
}

}  // namespace

int main() {
  std::vector<std::pair<char const*, std::function<Verdict()>>> const criteria{
      {"hungarian oracle equivalence", hungarian_oracle},
      {"kalman trust limits", kalman_limits},
      {"lifecycle thresholds", lifecycle_thresholds},
      {"hijack efficiency", hijack_efficiency},
      {"one-frame ordering", one_frame_ordering},
      {"baseline gap", baseline_gap},
      {"persistence effects", persistence},
      {"gradient check", gradient_check},
      {"move-in vs move-out", move_in_vs_move_out},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  int n = 0;
  for (auto const& [name, check] : criteria) {
    ++n;
    Verdict v;
    try {
      v = check();
    } catch (std::exception const& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", n, name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
