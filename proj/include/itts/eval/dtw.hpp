// Copyright (c) 2026 The itts Authors
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

#include <string_view>
#include <utility>
#include <vector>

namespace itts::eval {

using Sequence = std::vector<std::vector<double>>;

enum class DtwMetric { kL1, kL2, kSquaredL2 };

// "l1", "l2", "sqeuclidean"; Error{kInvalidArgument} otherwise.
DtwMetric parse_dtw_metric(std::string_view name);
double frame_distance(const std::vector<double>& x, const std::vector<double>& y, DtwMetric metric);

// Warping path as 0-based (i, j) pairs from (0, 0) to (n-1, m-1) with steps
// (1,0), (0,1) or (1,1); cost is the sum of frame distances along it.
struct DtwPath {
  std::vector<std::pair<size_t, size_t>> pairs;
  double cost = 0.0;

  bool is_valid(size_t n, size_t m) const;
};

// Exact minimum-cost path by full dynamic programming. On equal cost the
// diagonal step is preferred, then (1,0). Throws Error{kInvalidArgument} for
// empty input and Error{kShapeMismatch} for frames of different widths.
DtwPath dtw(const Sequence& a, const Sequence& b, DtwMetric metric = DtwMetric::kL2);

// Multi-resolution approximation (coarsen by 2, project, refine within
// `radius` cells). Falls back to the exact program for short inputs.
DtwPath fast_dtw(const Sequence& a, const Sequence& b, DtwMetric metric = DtwMetric::kL2,
                 size_t radius = 1);

// Scalar-sequence convenience overloads.
Sequence as_sequence(const std::vector<double>& values);

}  // namespace itts::eval
