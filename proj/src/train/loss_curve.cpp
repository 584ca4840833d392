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

#include "itts/train/loss_curve.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "itts/error.hpp"

namespace itts::train {

void LossCurve::add(int64_t step, const std::string& term, double value) {
  points_.push_back({step, term, value});
}

std::vector<double> LossCurve::series(const std::string& term) const {
  std::vector<double> out;
  for (const auto& p : points_) {
    if (p.term == term) out.push_back(p.value);
  }
  return out;
}

std::vector<int64_t> LossCurve::steps(const std::string& term) const {
  std::vector<int64_t> out;
  for (const auto& p : points_) {
    if (p.term == term) out.push_back(p.step);
  }
  return out;
}

std::vector<std::string> LossCurve::terms() const {
  std::vector<std::string> out;
  for (const auto& p : points_) {
    if (std::find(out.begin(), out.end(), p.term) == out.end()) out.push_back(p.term);
  }
  return out;
}

void LossCurve::write_csv(std::ostream& out) const {
  out << "step,term,value\n";
  char buf[64];
  for (const auto& p : points_) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.value);
    out << p.step << ',' << p.term << ',' << buf << '\n';
  }
}

void LossCurve::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_csv(out);
}

LossCurve LossCurve::read_csv(std::istream& in) {
  LossCurve curve;
  std::string line;
  if (!std::getline(in, line) || line != "step,term,value") {
    throw Error(ErrorCode::kFormat, "loss curve header must be 'step,term,value'");
  }
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto a = line.find(',');
    const auto b = line.find(',', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) {
      throw Error(ErrorCode::kFormat, "malformed loss curve row " + std::to_string(lineno));
    }
    try {
      size_t used = 0;
      const auto step = std::stoll(line.substr(0, a), &used);
      if (used != a) throw std::invalid_argument("step");
      const auto value_text = line.substr(b + 1);
      const double value = std::stod(value_text, &used);
      if (used != value_text.size()) throw std::invalid_argument("value");
      curve.add(step, line.substr(a + 1, b - a - 1), value);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kFormat, "malformed loss curve row " + std::to_string(lineno));
    }
  }
  return curve;
}

LossCurve LossCurve::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  return read_csv(in);
}

}  // namespace itts::train
