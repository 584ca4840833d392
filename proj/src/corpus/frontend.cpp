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

#include "itts/corpus/frontend.hpp"

#include "itts/corpus/text.hpp"
#include "itts/error.hpp"

namespace itts::corpus {

void TextFrontend::set_table(const std::string& language, TransliterationTable table) {
  tables_.insert_or_assign(language, std::move(table));
}

std::string TextFrontend::process(std::string_view raw, const std::string& language) const {
  const std::string normalized = normalize_text(raw);
  auto it = tables_.find(language);
  static const TransliterationTable kIdentity("common");
  return transliterate(normalized, it != tables_.end() ? it->second : kIdentity);
}

UtteranceFeatures compute_features(const AudioClip& clip, const MelConfig& cfg) {
  UtteranceFeatures f;
  f.audio = clip.sample_rate == cfg.sample_rate ? clip : resample(clip, cfg.sample_rate);
  f.mel = mel_spectrogram(f.audio, cfg);
  PitchConfig pc;
  pc.hop_length = cfg.hop_length;
  f.pitch = AutocorrelationPitchEstimator(pc).estimate(f.audio);
  if (static_cast<int64_t>(f.pitch.num_frames()) != f.mel.num_frames()) {
    throw Error(ErrorCode::kShapeMismatch, "pitch and mel frame counts differ");
  }
  return f;
}

}  // namespace itts::corpus
