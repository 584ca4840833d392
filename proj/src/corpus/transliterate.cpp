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

#include "itts/corpus/transliterate.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "itts/corpus/text.hpp"
#include "itts/error.hpp"

namespace itts::corpus {
namespace {

constexpr char32_t kVirama = U'्';

struct Pair {
  std::u32string_view native;
  std::u32string_view common;
};

constexpr Pair kIndependentVowels[] = {
    {U"अ", U"a"},  {U"आ", U"ā"},  {U"इ", U"i"},  {U"ई", U"ī"},
    {U"उ", U"u"},  {U"ऊ", U"ū"},  {U"ऋ", U"r̥"}, {U"ॠ", U"r̥̄"},
    {U"ऌ", U"l̥"}, {U"ए", U"ē"},  {U"ऐ", U"ai"}, {U"ओ", U"ō"},
    {U"औ", U"au"}, {U"ऑ", U"ô"},
};

constexpr Pair kVowelSigns[] = {
    {U"ा", U"ā"}, {U"ि", U"i"}, {U"ी", U"ī"},  {U"ु", U"u"},
    {U"ू", U"ū"}, {U"ृ", U"r̥"}, {U"ॄ", U"r̥̄"}, {U"े", U"ē"},
    {U"ै", U"ai"}, {U"ो", U"ō"}, {U"ौ", U"au"}, {U"ॉ", U"ô"},
};

constexpr Pair kConsonants[] = {
    {U"क", U"k"},   {U"ख", U"kh"}, {U"ग", U"g"},  {U"घ", U"gh"}, {U"ङ", U"ṅ"},
    {U"च", U"c"},   {U"छ", U"ch"}, {U"ज", U"j"},  {U"झ", U"jh"}, {U"ञ", U"ñ"},
    {U"ट", U"ṭ"},   {U"ठ", U"ṭh"}, {U"ड", U"ḍ"},  {U"ढ", U"ḍh"}, {U"ण", U"ṇ"},
    {U"त", U"t"},   {U"थ", U"th"}, {U"द", U"d"},  {U"ध", U"dh"}, {U"न", U"n"},
    {U"प", U"p"},   {U"फ", U"ph"}, {U"ब", U"b"},  {U"भ", U"bh"}, {U"म", U"m"},
    {U"य", U"y"},   {U"र", U"r"},  {U"ल", U"l"},  {U"व", U"v"},  {U"श", U"ś"},
    {U"ष", U"ṣ"},   {U"स", U"s"},  {U"ह", U"h"},  {U"ळ", U"ḷ"},
    // Nukta forms in canonical (decomposed) order.
    {U"क़", U"q"}, {U"ख़", U"k͟h"}, {U"ग़", U"ġ"}, {U"ज़", U"z"},
    {U"ड़", U"ṛ"}, {U"ढ़", U"ṛh"}, {U"फ़", U"f"}, {U"य़", U"ẏ"},
};

constexpr Pair kSigns[] = {
    {U"ं", U"ṁ"}, {U"ः", U"ḥ"}, {U"ँ", U"m̐"}, {U"ऽ", U"'"},
    {U"।", U"."}, {U"॥", U"."}, {U"०", U"0"}, {U"१", U"1"},
    {U"२", U"2"}, {U"३", U"3"}, {U"४", U"4"}, {U"५", U"5"},
    {U"६", U"6"}, {U"७", U"7"}, {U"८", U"8"}, {U"९", U"9"},
};

bool is_iso_letter(char32_t c) {
  static const std::set<char32_t> kLetters = [] {
    std::set<char32_t> s;
    for (const auto* group : {U"āīūēōôṁḥṅñṭḍṇśṣḷṛġẏ", U"ĀĪŪĒŌṀḤṄÑṬḌṆŚṢḶṚ"}) {
      for (const char32_t* p = group; *p; ++p) s.insert(*p);
    }
    // Combining ring below, macron, candrabindu, double macron below.
    for (char32_t c : {U'̥', U'̄', U'̐', U'͟'}) s.insert(c);
    return s;
  }();
  return kLetters.count(c) > 0;
}

}  // namespace

bool is_common_script(char32_t c) {
  if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9')) {
    return true;
  }
  if (c == U' ' || c == U'\t' || c == U'\n') return true;
  if (std::u32string_view(U".,!?'\"-").find(c) != std::u32string_view::npos) return true;
  return is_iso_letter(c);
}

void TransliterationTable::add(std::u32string_view native, std::u32string_view common) {
  if (native.empty()) throw Error(ErrorCode::kFormat, "empty native grapheme");
  for (char32_t c : common) {
    if (!is_common_script(c)) {
      throw Error(ErrorCode::kFormat, "mapping for '" + to_utf8(native) +
                                          "' leaves the common script: '" +
                                          to_utf8(common) + "'");
    }
  }
  std::u32string key(native);
  auto it = mapping_.find(key);
  if (it != mapping_.end()) {
    if (it->second == common) return;
    throw Error(ErrorCode::kDuplicate, "conflicting mappings for '" + to_utf8(native) + "'");
  }
  mapping_.emplace(std::move(key), std::u32string(common));
  max_key_ = std::max(max_key_, native.size());
}

TransliterationTable TransliterationTable::parse_tsv(std::string_view text,
                                                     std::string language) {
  TransliterationTable table(std::move(language));
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kFormat,
                  "line " + std::to_string(line_no) + ": expected native<TAB>common");
    }
    table.add(to_code_points(nfc(line.substr(0, tab))),
              to_code_points(nfc(line.substr(tab + 1))));
  }
  return table;
}

TransliterationTable TransliterationTable::load_tsv(const std::filesystem::path& path,
                                                    std::string language) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_tsv(buf.str(), std::move(language));
}

const TransliterationTable& builtin_devanagari_table() {
  static const TransliterationTable table = [] {
    TransliterationTable t("hi");
    auto canon = [](std::u32string_view s) { return to_code_points(nfc(to_utf8(s))); };
    for (const auto& v : kIndependentVowels) t.add(canon(v.native), canon(v.common));
    for (const auto& s : kSigns) t.add(canon(s.native), canon(s.common));
    for (const auto& c : kConsonants) {
      const std::u32string base = canon(c.native);
      const std::u32string iso = canon(c.common);
      t.add(base, iso + U"a");
      t.add(base + kVirama, iso);
      for (const auto& m : kVowelSigns) t.add(base + canon(m.native), iso + canon(m.common));
    }
    return t;
  }();
  return table;
}

std::string transliterate(std::string_view text, const TransliterationTable& table,
                          TransliterationMode mode) {
  const std::u32string in = to_code_points(nfc(text));
  const auto& mapping = table.mapping();
  std::u32string out;
  std::vector<char32_t> unmapped;
  size_t i = 0;
  while (i < in.size()) {
    bool matched = false;
    const size_t longest = std::min(table.max_key_length(), in.size() - i);
    for (size_t len = longest; len > 0; --len) {
      auto it = mapping.find(in.substr(i, len));
      if (it != mapping.end()) {
        out += it->second;
        i += len;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (is_common_script(in[i])) {
      out.push_back(in[i]);
    } else if (std::find(unmapped.begin(), unmapped.end(), in[i]) == unmapped.end()) {
      unmapped.push_back(in[i]);
    }
    ++i;
  }
  if (!unmapped.empty() && mode == TransliterationMode::kStrict) {
    std::string msg = "unmapped graphemes for table '" + table.language() + "':";
    for (char32_t c : unmapped) {
      char hex[16];
      std::snprintf(hex, sizeof(hex), "U+%04X", static_cast<unsigned>(c));
      msg += " '" + to_utf8(c) + "' (" + hex + ")";
    }
    throw Error(ErrorCode::kUnmappedGrapheme, msg);
  }
  return nfc(to_utf8(out));
}

std::string TransliterationTable::to_tsv() const {
  std::string out;
  for (const auto& [native, common] : mapping_) out += to_utf8(native) + "\t" + to_utf8(common) + "\n";
  return out;
}

}  // namespace itts::corpus
