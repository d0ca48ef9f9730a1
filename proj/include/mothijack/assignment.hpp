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

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mothijack/geometry.hpp"

namespace mothijack {

/// Dense row-major cost matrix, rows = tracks, cols = detections.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

using Match = std::pair<std::size_t, std::size_t>;

struct Association {
  std::vector<Match> matches;  // (track index, detection index), sorted by track
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_detections;
};

/// Entry (i, j) = 1 - iou(predicted[i], detections[j]).
CostMatrix build_cost_matrix(std::span<BBox const> predicted, std::span<BBox const> detections);

/// Minimum-total-cost assignment of size min(rows, cols). Among optimal
/// assignments the lexicographically smallest one (by row, then column) is
/// returned. Rectangular inputs are padded with cost 1.0 internally; padded
/// pairs never appear in the result. Output is sorted by row.
std::vector<Match> hungarian_solve(CostMatrix const& m);

double total_cost(CostMatrix const& m, std::span<Match const> matching);

/// Global matching followed by gating: matched pairs with IoU below
/// `iou_gate` are split back into the unmatched lists.
Association associate(std::span<BBox const> predicted, std::span<BBox const> detections,
                      double iou_gate);

}  // namespace mothijack
