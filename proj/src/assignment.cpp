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

#include "mothijack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mothijack {

namespace {

constexpr double kPadCost = 1.0;

/// Square-matrix solver state: an optimal assignment plus a feasible dual.
/// Any perfect matching made only of tight edges (reduced cost zero) is
/// optimal, which is what the tie-breaking pass relies on.
struct DualSolution {
  std::vector<std::size_t> col_of_row;
  std::vector<double> u;  // row potentials
  std::vector<double> v;  // column potentials
};

// Shortest augmenting path formulation (Jonker-Volgenant style potentials).
DualSolution solve_square(std::vector<double> const& a, std::size_t n) {
  double const inf = std::numeric_limits<double>::infinity();
  // 1-based internally; index 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      std::size_t const i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double const cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t const j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  DualSolution sol;
  sol.col_of_row.assign(n, 0);
  sol.u.assign(n, 0.0);
  sol.v.assign(n, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    sol.col_of_row[p[j] - 1] = j - 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    sol.u[k] = u[k + 1];
    sol.v[k] = v[k + 1];
  }
  return sol;
}

/// Rewrites an optimal assignment into the lexicographically smallest optimal
/// one by walking rows in order and pulling each row onto its lowest tight
/// column, re-routing the displaced rows through tight edges.
void lexicographic_refine(std::vector<double> const& a, std::size_t n, DualSolution& sol) {
  double scale = 1.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  double const tol = 1e-9 * scale;
  auto tight = [&](std::size_t r, std::size_t c) {
    return std::abs(a[r * n + c] - sol.u[r] - sol.v[c]) <= tol;
  };

  std::vector<std::size_t>& col_of_row = sol.col_of_row;
  std::vector<std::size_t> row_of_col(n);
  for (std::size_t r = 0; r < n; ++r) row_of_col[col_of_row[r]] = r;

  std::vector<char> col_locked(n, 0);
  std::vector<char> visited(n, 0);
  std::vector<std::size_t> parent_col(n);

  for (std::size_t i = 0; i < n; ++i) {
    std::size_t const freed = col_of_row[i];
    for (std::size_t c = 0; c < freed; ++c) {
      if (col_locked[c] || !tight(i, c)) continue;
      // Row i takes c; the displaced row must reach `freed` along tight edges
      // through unlocked rows (> i) and columns.
      std::size_t const start = row_of_col[c];
      std::fill(visited.begin(), visited.end(), 0);
      visited[c] = 1;
      std::vector<std::size_t> stack{start};
      bool found = false;
      std::size_t end_row = n;
      while (!stack.empty() && !found) {
        std::size_t const r = stack.back();
        stack.pop_back();
        for (std::size_t c2 = 0; c2 < n; ++c2) {
          if (visited[c2] || col_locked[c2] || !tight(r, c2)) continue;
          visited[c2] = 1;
          parent_col[c2] = r;
          if (c2 == freed) {
            found = true;
            end_row = r;
            break;
          }
          std::size_t const next = row_of_col[c2];
          if (next == i) continue;
          stack.push_back(next);
        }
      }
      if (!found) continue;
      // Walk back from the freed column, shifting each row onto the column
      // discovered for it.
      std::size_t col = freed;
      std::size_t row = end_row;
      while (true) {
        std::size_t const prev_col = col_of_row[row];
        col_of_row[row] = col;
        row_of_col[col] = row;
        if (row == start) break;
        col = prev_col;
        row = parent_col[col];
      }
      col_of_row[i] = c;
      row_of_col[c] = i;
      break;
    }
    col_locked[col_of_row[i]] = 1;
  }
}

}  // namespace

CostMatrix build_cost_matrix(std::span<BBox const> predicted, std::span<BBox const> detections) {
  CostMatrix m(predicted.size(), detections.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    for (std::size_t j = 0; j < detections.size(); ++j) {
      m(i, j) = 1.0 - iou(predicted[i], detections[j]);
    }
  }
  return m;
}

std::vector<Match> hungarian_solve(CostMatrix const& m) {
  std::size_t const n = std::max(m.rows(), m.cols());
  if (m.rows() == 0 || m.cols() == 0) {
    return {};
  }
  std::vector<double> a(n * n, kPadCost);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      double const x = m(r, c);
      if (!std::isfinite(x)) {
        throw std::invalid_argument("hungarian_solve: non-finite cost");
      }
      a[r * n + c] = x;
    }
  }

  DualSolution sol = solve_square(a, n);
  lexicographic_refine(a, n, sol);

  std::vector<Match> out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::size_t const c = sol.col_of_row[r];
    if (c < m.cols()) {
      out.emplace_back(r, c);
    }
  }
  return out;
}

double total_cost(CostMatrix const& m, std::span<Match const> matching) {
  double sum = 0.0;
  for (auto const& [r, c] : matching) sum += m(r, c);
  return sum;
}

Association associate(std::span<BBox const> predicted, std::span<BBox const> detections,
                      double iou_gate) {
  if (!(iou_gate > 0.0 && iou_gate < 1.0)) {
    throw std::invalid_argument("associate: iou gate must lie in (0, 1)");
  }
  Association out;
  CostMatrix const cost = build_cost_matrix(predicted, detections);
  std::vector<char> track_used(predicted.size(), 0);
  std::vector<char> det_used(detections.size(), 0);
  for (auto const& [r, c] : hungarian_solve(cost)) {
    if (cost(r, c) <= 1.0 - iou_gate) {
      out.matches.emplace_back(r, c);
      track_used[r] = 1;
      det_used[c] = 1;
    }
  }
  for (std::size_t r = 0; r < predicted.size(); ++r) {
    if (!track_used[r]) out.unmatched_tracks.push_back(r);
  }
  for (std::size_t c = 0; c < detections.size(); ++c) {
    if (!det_used[c]) out.unmatched_detections.push_back(c);
  }
  return out;
}

}  // namespace mothijack
