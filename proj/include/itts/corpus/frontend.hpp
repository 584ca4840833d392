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

#include "itts/corpus/audio.hpp"
#include "itts/corpus/manifest.hpp"
#include "itts/corpus/mel.hpp"
#include "itts/corpus/pitch.hpp"
#include "itts/corpus/transliterate.hpp"

namespace itts::corpus {

// raw text -> normalize_text -> transliterate with the language's table.
// Languages without a table must already be in the common script.
class TextFrontend {
 public:
  void set_table(const std::string& language, TransliterationTable table);
  bool has_table(const std::string& language) const { return tables_.count(language) > 0; }
  const std::map<std::string, TransliterationTable>& tables() const { return tables_; }

  std::string process(std::string_view raw, const std::string& language) const;

 private:
  std::map<std::string, TransliterationTable> tables_;
};

struct UtteranceFeatures {
  AudioClip audio;  // at cfg.sample_rate
  MelSpectrogram mel;
  PitchTrack pitch;  // same frame count as mel
};

// Resamples to cfg.sample_rate when needed, then extracts mel and F0.
UtteranceFeatures compute_features(const AudioClip& clip, const MelConfig& cfg = {});

}  // namespace itts::corpus
