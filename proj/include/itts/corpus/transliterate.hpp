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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace itts::corpus {

// Grapheme-cluster table from one native script into the common romanized
// script (ISO 15919 letters). Lookup is greedy longest-match over code points.
class TransliterationTable {
 public:
  TransliterationTable() = default;
  explicit TransliterationTable(std::string language) : language_(std::move(language)) {}

  // Throws Error{kFormat} if `common` leaves the common-script set, and
  // Error{kDuplicate} if `native` is already mapped to something else.
  void add(std::u32string_view native, std::u32string_view common);

  const std::string& language() const { return language_; }
  size_t size() const { return mapping_.size(); }
  size_t max_key_length() const { return max_key_; }
  const std::map<std::u32string, std::u32string>& mapping() const { return mapping_; }

  // "native<TAB>common" per line; blank lines and lines starting with '#'
  // are skipped.
  static TransliterationTable load_tsv(const std::filesystem::path& path,
                                       std::string language);
  static TransliterationTable parse_tsv(std::string_view text, std::string language);
  // Inverse of parse_tsv, entries in key order.
  std::string to_tsv() const;

 private:
  std::string language_;
  std::map<std::u32string, std::u32string> mapping_;
  size_t max_key_ = 0;
};

// Letters, digits, ISO 15919 diacritic letters and combining marks,
// whitespace and basic punctuation.
bool is_common_script(char32_t c);

// Small Devanagari -> ISO 15919 table: vowels, consonants (with nukta forms)
// expanded against every vowel sign and the virama, anusvara, visarga,
// candrabindu, danda and digits.
const TransliterationTable& builtin_devanagari_table();

enum class TransliterationMode { kStrict, kPassThrough };

// The input is NFC-normalized first. Characters already in the common script
// pass through. In strict mode any other unmapped character raises
// Error{kUnmappedGrapheme} listing every offender; in pass-through mode they
// are dropped.
std::string transliterate(std::string_view text, const TransliterationTable& table,
                          TransliterationMode mode = TransliterationMode::kStrict);

}  // namespace itts::corpus
