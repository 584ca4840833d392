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

#include <string>
#include <vector>

#include "itts/acoustic/config.hpp"
#include "itts/train/dataset.hpp"
#include "test_support.hpp"

namespace itts::testing {

// Small in-memory corpus of synthetic voiced utterances, one per text.
inline train::AcousticDataset toy_dataset(const std::vector<std::string>& texts, double seconds = 0.5,
                                          bool with_speakers = false) {
  train::AcousticDataset data;
  data.vocabulary = acoustic::Vocabulary::from_texts(texts);
  if (with_speakers) data.conditioning.speakers = {{"s0", 0}, {"s1", 1}};
  for (size_t i = 0; i < texts.size(); ++i) {
    acoustic::ConditioningIds cond;
    if (with_speakers) cond.speaker_id = static_cast<int64_t>(i % 2);
    const double f0 = 110.0 + 20.0 * static_cast<double>(i);
    data.items.push_back(train::make_acoustic_item("utt" + std::to_string(i), texts[i],
                                                   vowel_sweep(seconds, f0, f0 * 1.3), data.vocabulary,
                                                   cond, data.mel_config));
  }
  train::compute_pitch_statistics(data);
  return data;
}

inline acoustic::AcousticConfig toy_acoustic_config() {
  auto cfg = acoustic::AcousticConfig::toy(0);
  cfg.encoder.dropout = cfg.decoder.dropout = 0.0;
  cfg.duration_predictor.dropout = cfg.pitch_predictor.dropout = 0.0;
  return cfg;
}

}  // namespace itts::testing
