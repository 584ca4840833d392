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

#include "itts/acoustic/vocabulary.hpp"

#include <algorithm>
#include <set>

#include "itts/corpus/text.hpp"
#include "itts/error.hpp"

namespace itts::acoustic {

Vocabulary Vocabulary::from_texts(const std::vector<std::string>& texts) {
  std::set<char32_t> seen;
  for (const auto& t : texts) {
    for (char32_t c : corpus::to_code_points(t)) seen.insert(c);
  }
  Vocabulary v;
  for (char32_t c : seen) {
    v.index_[c] = static_cast<int64_t>(v.symbols_.size());
    v.symbols_.push_back(c);
  }
  return v;
}

Vocabulary Vocabulary::from_symbols(const std::vector<std::string>& symbols) {
  Vocabulary v;
  for (const auto& s : symbols) {
    const auto cps = corpus::to_code_points(s);
    if (cps.size() != 1) throw Error(ErrorCode::kFormat, "vocabulary symbol must be one code point");
    if (!v.index_.emplace(cps[0], static_cast<int64_t>(v.symbols_.size())).second) {
      throw Error(ErrorCode::kDuplicate, "duplicate vocabulary symbol '" + s + "'");
    }
    v.symbols_.push_back(cps[0]);
  }
  return v;
}

std::vector<int64_t> Vocabulary::encode(std::string_view text) const {
  std::vector<int64_t> ids;
  std::u32string missing;
  for (char32_t c : corpus::to_code_points(text)) {
    auto it = index_.find(c);
    if (it == index_.end()) {
      if (missing.find(c) == std::u32string::npos) missing.push_back(c);
      continue;
    }
    ids.push_back(it->second);
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::kUnmappedGrapheme,
                "out-of-vocabulary characters: '" + corpus::to_utf8(missing) + "'");
  }
  return ids;
}

std::string Vocabulary::decode(const std::vector<int64_t>& ids) const {
  std::u32string out;
  for (int64_t id : ids) {
    if (id < 0 || id >= size()) throw Error(ErrorCode::kOutOfRange, "token id out of range");
    out.push_back(symbols_[static_cast<size_t>(id)]);
  }
  return corpus::to_utf8(out);
}

std::vector<std::string> Vocabulary::symbols() const {
  std::vector<std::string> out;
  out.reserve(symbols_.size());
  for (char32_t c : symbols_) out.push_back(corpus::to_utf8(c));
  return out;
}

}  // namespace itts::acoustic
