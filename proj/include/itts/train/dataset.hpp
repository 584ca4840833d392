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

#include <torch/torch.h>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "itts/acoustic/config.hpp"
#include "itts/acoustic/vocabulary.hpp"
#include "itts/corpus/frontend.hpp"
#include "itts/corpus/manifest.hpp"
#include "itts/corpus/mel.hpp"

namespace itts::train {

// Speaker and language name -> embedding row, assigned in sorted name order.
struct ConditioningMaps {
  std::map<std::string, int64_t> speakers;
  std::map<std::string, int64_t> languages;

  // Throws Error{kNotFound} for names absent from a non-empty map. Empty
  // maps yield no id.
  acoustic::ConditioningIds lookup(const std::string& speaker, const std::string& language) const;
};

void to_json(nlohmann::json& j, const ConditioningMaps& m);
void from_json(const nlohmann::json& j, ConditioningMaps& m);

struct AcousticItem {
  std::string id;
  std::string text;  // common-script text the tokens were encoded from
  std::vector<int64_t> tokens;
  acoustic::ConditioningIds cond;
  torch::Tensor mel;       // [T, n_mels]
  std::vector<double> f0;  // per mel frame
};

struct AcousticDataset {
  std::vector<AcousticItem> items;
  acoustic::Vocabulary vocabulary;
  ConditioningMaps conditioning;
  corpus::MelConfig mel_config;
  corpus::TextFrontend frontend;
  double pitch_mean = 0.0;  // over voiced frames, Hz
  double pitch_std = 1.0;

  size_t size() const { return items.size(); }
  // Copies vocabulary size, speaker/language counts and pitch statistics
  // into cfg.
  void configure(acoustic::AcousticConfig& cfg) const;
};

// One item from in-memory audio; used by the builder and by tests.
AcousticItem make_acoustic_item(const std::string& id, const std::string& text,
                                const corpus::AudioClip& audio, const acoustic::Vocabulary& vocabulary,
                                const acoustic::ConditioningIds& cond, const corpus::MelConfig& mel_cfg);
// Same from already extracted features.
AcousticItem make_acoustic_item(const std::string& id, const std::string& text, torch::Tensor mel,
                                std::vector<double> f0, const acoustic::Vocabulary& vocabulary,
                                const acoustic::ConditioningIds& cond);

// Mel and F0 per utterance id, stored with the mel settings they were
// computed with.
struct FeatureCache {
  corpus::MelConfig mel_config;
  std::map<std::string, std::pair<torch::Tensor, std::vector<double>>> features;

  void save(const std::filesystem::path& path) const;
  // Throws Error{kFormat} for files of another kind.
  static FeatureCache load(const std::filesystem::path& path);
};
FeatureCache feature_cache_of(const AcousticDataset& dataset);

// Reads every utterance's audio, runs the text front end (normalized_text
// from the manifest is re-used when present), builds the vocabulary and the
// conditioning maps and extracts mel/F0 features. Throws Error{kValidation}
// for an empty manifest.
// Features found in `cache` (when given and computed with equal mel
// settings) are reused instead of re-reading the audio.
AcousticDataset build_acoustic_dataset(const corpus::Manifest& manifest,
                                       const corpus::TextFrontend& frontend,
                                       const corpus::MelConfig& mel_cfg = {},
                                       const FeatureCache* cache = nullptr);

// Fills pitch_mean/pitch_std from the voiced frames of all items
// (0 / 1 when nothing is voiced).
void compute_pitch_statistics(AcousticDataset& dataset);

// Audio of every utterance, resampled to mel_cfg.sample_rate.
std::vector<corpus::AudioClip> load_vocoder_clips(const corpus::Manifest& manifest,
                                                  const corpus::MelConfig& mel_cfg = {});

}  // namespace itts::train
