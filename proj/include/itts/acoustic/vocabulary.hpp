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

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace itts::acoustic {

// Character-level token inventory over the common script. Token ids follow
// code-point order of the symbols seen at construction.
class Vocabulary {
 public:
  Vocabulary() = default;
  static Vocabulary from_texts(const std::vector<std::string>& texts);
  static Vocabulary from_symbols(const std::vector<std::string>& symbols);

  // Throws Error{kUnmappedGrapheme} naming every out-of-vocabulary character.
  std::vector<int64_t> encode(std::string_view text) const;
  std::string decode(const std::vector<int64_t>& ids) const;

  int64_t size() const { return static_cast<int64_t>(symbols_.size()); }
  // UTF-8 symbols in id order.
  std::vector<std::string> symbols() const;

 private:
  std::u32string symbols_;
  std::map<char32_t, int64_t> index_;
};

}  // namespace itts::acoustic
