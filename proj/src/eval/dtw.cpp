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

#include "itts/eval/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "itts/error.hpp"

namespace itts::eval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(const Sequence& a, const Sequence& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kInvalidArgument, "dtw needs non-empty sequences");
  const size_t d = a.front().size();
  for (const auto* s : {&a, &b}) {
    for (const auto& f : *s) {
      if (f.size() != d) throw Error(ErrorCode::kShapeMismatch, "dtw frames differ in width");
    }
  }
}

// DP restricted to a window of allowed cells (all cells when window empty).
// window[i] = [lo, hi] inclusive column range for row i.
DtwPath windowed_dtw(const Sequence& a, const Sequence& b, DtwMetric metric,
                     const std::vector<std::pair<size_t, size_t>>& window) {
  const size_t n = a.size(), m = b.size();
  auto lo = [&](size_t i) { return window.empty() ? size_t{0} : window[i].first; };
  auto hi = [&](size_t i) { return window.empty() ? m - 1 : window[i].second; };

  std::vector<double> acc(n * m, kInf);
  auto at = [&](size_t i, size_t j) -> double& { return acc[i * m + j]; };
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = lo(i); j <= hi(i); ++j) {
      const double d = frame_distance(a[i], b[j], metric);
      if (i == 0 && j == 0) {
        at(i, j) = d;
        continue;
      }
      double best = kInf;
      if (i > 0 && j > 0) best = at(i - 1, j - 1);
      if (i > 0) best = std::min(best, at(i - 1, j));
      if (j > 0) best = std::min(best, at(i, j - 1));
      at(i, j) = best + d;
    }
  }
  if (!std::isfinite(at(n - 1, m - 1))) {
    throw Error(ErrorCode::kInvalidArgument, "dtw window does not connect the corners");
  }

  DtwPath path;
  path.cost = at(n - 1, m - 1);
  size_t i = n - 1, j = m - 1;
  path.pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const double diag = at(i - 1, j - 1), up = at(i - 1, j), left = at(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    } else if (i > 0) {
      --i;
    } else {
      --j;
    }
    path.pairs.emplace_back(i, j);
  }
  std::reverse(path.pairs.begin(), path.pairs.end());
  return path;
}

Sequence coarsen(const Sequence& s) {
  Sequence out;
  for (size_t i = 0; i < s.size(); i += 2) {
    if (i + 1 < s.size()) {
      std::vector<double> f(s[i].size());
      for (size_t k = 0; k < f.size(); ++k) f[k] = 0.5 * (s[i][k] + s[i + 1][k]);
      out.push_back(std::move(f));
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

DtwPath fast_dtw_impl(const Sequence& a, const Sequence& b, DtwMetric metric, size_t radius) {
  const size_t min_size = radius + 2;
  if (a.size() <= min_size || b.size() <= min_size) return windowed_dtw(a, b, metric, {});

  const auto coarse = fast_dtw_impl(coarsen(a), coarsen(b), metric, radius);
  const size_t n = a.size(), m = b.size();
  std::vector<std::pair<size_t, size_t>> window(n, {m, 0});
  auto widen = [&](size_t i, size_t j) {
    if (i >= n) return;
    window[i].first = std::min(window[i].first, j);
    window[i].second = std::max(window[i].second, std::min(j, m - 1));
  };
  for (const auto& [ci, cj] : coarse.pairs) {
    // Each coarse cell covers a 2x2 block; grow it by the radius.
    const size_t i0 = 2 * ci, j0 = 2 * cj;
    const size_t ilo = i0 >= radius ? i0 - radius : 0;
    const size_t jlo = j0 >= radius ? j0 - radius : 0;
    for (size_t i = ilo; i <= i0 + 1 + radius; ++i) {
      widen(i, jlo);
      widen(i, j0 + 1 + radius);
    }
  }
  // Keep consecutive rows overlapping so every row connects to the next.
  for (size_t i = 0; i + 1 < n; ++i) {
    if (window[i + 1].first > window[i].second) window[i].second = window[i + 1].first;
  }
  window[0].first = 0;
  window[n - 1].second = m - 1;
  for (size_t i = 1; i < n; ++i) {
    if (window[i].first > window[i - 1].second) window[i].first = window[i - 1].second;
  }
  return windowed_dtw(a, b, metric, window);
}

}  // namespace

DtwMetric parse_dtw_metric(std::string_view name) {
  if (name == "l1") return DtwMetric::kL1;
  if (name == "l2") return DtwMetric::kL2;
  if (name == "sqeuclidean") return DtwMetric::kSquaredL2;
  throw Error(ErrorCode::kInvalidArgument, "unknown dtw metric '" + std::string(name) + "'");
}

double frame_distance(const std::vector<double>& x, const std::vector<double>& y, DtwMetric metric) {
  double s = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    s += metric == DtwMetric::kL1 ? std::abs(d) : d * d;
  }
  return metric == DtwMetric::kL2 ? std::sqrt(s) : s;
}

bool DtwPath::is_valid(size_t n, size_t m) const {
  if (pairs.empty() || pairs.front() != std::pair<size_t, size_t>{0, 0} ||
      pairs.back() != std::pair<size_t, size_t>{n - 1, m - 1}) {
    return false;
  }
  for (size_t k = 1; k < pairs.size(); ++k) {
    const auto di = pairs[k].first - pairs[k - 1].first;
    const auto dj = pairs[k].second - pairs[k - 1].second;
    if (pairs[k].first < pairs[k - 1].first || pairs[k].second < pairs[k - 1].second) return false;
    if (di > 1 || dj > 1 || (di == 0 && dj == 0)) return false;
  }
  return true;
}

DtwPath dtw(const Sequence& a, const Sequence& b, DtwMetric metric) {
  check_inputs(a, b);
  return windowed_dtw(a, b, metric, {});
}

DtwPath fast_dtw(const Sequence& a, const Sequence& b, DtwMetric metric, size_t radius) {
  check_inputs(a, b);
  return fast_dtw_impl(a, b, metric, radius);
}

Sequence as_sequence(const std::vector<double>& values) {
  Sequence out;
  out.reserve(values.size());
  for (double v : values) out.push_back({v});
  return out;
}

}  // namespace itts::eval
