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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace itts::train {

struct LossPoint {
  int64_t step = 0;
  std::string term;
  double value = 0.0;
};

// Long-format loss log: one (step, term, value) row per recorded term.
class LossCurve {
 public:
  void add(int64_t step, const std::string& term, double value);
  const std::vector<LossPoint>& points() const { return points_; }
  bool empty() const { return points_.empty(); }

  // Values of one term in step order.
  std::vector<double> series(const std::string& term) const;
  std::vector<int64_t> steps(const std::string& term) const;
  // Terms in first-seen order.
  std::vector<std::string> terms() const;

  // Header "step,term,value"; values printed with 17 significant digits.
  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
  // Throws Error{kFormat} on a malformed header or row.
  static LossCurve read_csv(std::istream& in);
  static LossCurve read_csv(const std::filesystem::path& path);

 private:
  std::vector<LossPoint> points_;
};

}  // namespace itts::train
