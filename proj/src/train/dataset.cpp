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

#include "itts/train/dataset.hpp"

#include <cmath>
#include <set>

#include "itts/checkpoint.hpp"
#include "itts/corpus/text.hpp"
#include "itts/error.hpp"

namespace itts::train {

acoustic::ConditioningIds ConditioningMaps::lookup(const std::string& speaker,
                                                   const std::string& language) const {
  acoustic::ConditioningIds ids;
  if (!speakers.empty()) {
    auto it = speakers.find(speaker);
    if (it == speakers.end()) throw Error(ErrorCode::kNotFound, "unknown speaker '" + speaker + "'");
    ids.speaker_id = it->second;
  }
  if (!languages.empty()) {
    auto it = languages.find(language);
    if (it == languages.end()) throw Error(ErrorCode::kNotFound, "unknown language '" + language + "'");
    ids.language_id = it->second;
  }
  return ids;
}

void to_json(nlohmann::json& j, const ConditioningMaps& m) {
  j = {{"speakers", m.speakers}, {"languages", m.languages}};
}

void from_json(const nlohmann::json& j, ConditioningMaps& m) {
  m.speakers = j.value("speakers", std::map<std::string, int64_t>{});
  m.languages = j.value("languages", std::map<std::string, int64_t>{});
}

void AcousticDataset::configure(acoustic::AcousticConfig& cfg) const {
  cfg.vocab_size = vocabulary.size();
  cfg.n_mels = mel_config.n_mels;
  cfg.num_speakers = static_cast<int64_t>(conditioning.speakers.size());
  cfg.num_languages = static_cast<int64_t>(conditioning.languages.size());
  cfg.pitch_mean = pitch_mean;
  cfg.pitch_std = pitch_std;
}

AcousticItem make_acoustic_item(const std::string& id, const std::string& text,
                                const corpus::AudioClip& audio, const acoustic::Vocabulary& vocabulary,
                                const acoustic::ConditioningIds& cond, const corpus::MelConfig& mel_cfg) {
  auto features = corpus::compute_features(audio, mel_cfg);
  return make_acoustic_item(id, text, features.mel.frames, std::move(features.pitch.f0), vocabulary, cond);
}

AcousticItem make_acoustic_item(const std::string& id, const std::string& text, torch::Tensor mel,
                                std::vector<double> f0, const acoustic::Vocabulary& vocabulary,
                                const acoustic::ConditioningIds& cond) {
  AcousticItem item;
  item.id = id;
  item.text = text;
  item.tokens = vocabulary.encode(text);
  if (item.tokens.empty()) throw Error(ErrorCode::kValidation, "utterance '" + id + "' has empty text");
  item.cond = cond;
  item.mel = std::move(mel);
  item.f0 = std::move(f0);
  if (static_cast<int64_t>(item.f0.size()) != item.mel.size(0)) {
    throw Error(ErrorCode::kShapeMismatch, "utterance '" + id + "' has mismatched mel and F0 lengths");
  }
  if (item.mel.size(0) < static_cast<int64_t>(item.tokens.size())) {
    throw Error(ErrorCode::kInfeasibleAlignment,
                "utterance '" + id + "' has fewer mel frames than tokens");
  }
  return item;
}

void compute_pitch_statistics(AcousticDataset& dataset) {
  double sum = 0.0, sq = 0.0;
  size_t n = 0;
  for (const auto& item : dataset.items) {
    for (double f : item.f0) {
      if (f > 0.0) {
        sum += f;
        sq += f * f;
        ++n;
      }
    }
  }
  if (n == 0) {
    dataset.pitch_mean = 0.0;
    dataset.pitch_std = 1.0;
    return;
  }
  dataset.pitch_mean = sum / static_cast<double>(n);
  const double var = sq / static_cast<double>(n) - dataset.pitch_mean * dataset.pitch_mean;
  dataset.pitch_std = var > 1e-12 ? std::sqrt(var) : 1.0;
}

AcousticDataset build_acoustic_dataset(const corpus::Manifest& manifest,
                                       const corpus::TextFrontend& frontend,
                                       const corpus::MelConfig& mel_cfg, const FeatureCache* cache) {
  if (cache != nullptr && !(cache->mel_config == mel_cfg)) cache = nullptr;
  if (manifest.empty()) throw Error(ErrorCode::kValidation, "manifest is empty");
  mel_cfg.validate();

  AcousticDataset ds;
  ds.mel_config = mel_cfg;
  ds.frontend = frontend;

  std::vector<std::string> texts;
  std::set<std::string> speakers, languages;
  for (const auto& u : manifest.utterances) {
    texts.push_back(frontend.process(u.normalized_text.empty() ? u.raw_text : u.normalized_text,
                                     u.language));
    speakers.insert(u.speaker_id);
    languages.insert(u.language);
  }
  ds.vocabulary = acoustic::Vocabulary::from_texts(texts);
  for (const auto& s : speakers) ds.conditioning.speakers.emplace(s, ds.conditioning.speakers.size());
  for (const auto& l : languages) ds.conditioning.languages.emplace(l, ds.conditioning.languages.size());

  for (size_t i = 0; i < manifest.size(); ++i) {
    const auto& u = manifest.utterances[i];
    const auto cond = ds.conditioning.lookup(u.speaker_id, u.language);
    if (cache != nullptr) {
      auto it = cache->features.find(u.id);
      if (it != cache->features.end()) {
        ds.items.push_back(make_acoustic_item(u.id, texts[i], it->second.first, it->second.second,
                                              ds.vocabulary, cond));
        continue;
      }
    }
    ds.items.push_back(make_acoustic_item(u.id, texts[i], corpus::read_wav(u.audio_path), ds.vocabulary,
                                          cond, mel_cfg));
  }
  compute_pitch_statistics(ds);
  return ds;
}

std::vector<corpus::AudioClip> load_vocoder_clips(const corpus::Manifest& manifest,
                                                  const corpus::MelConfig& mel_cfg) {
  if (manifest.empty()) throw Error(ErrorCode::kValidation, "manifest is empty");
  std::vector<corpus::AudioClip> clips;
  for (const auto& u : manifest.utterances) {
    auto clip = corpus::read_wav(u.audio_path);
    if (clip.sample_rate != mel_cfg.sample_rate) clip = corpus::resample(clip, mel_cfg.sample_rate);
    clips.push_back(std::move(clip));
  }
  return clips;
}

void FeatureCache::save(const std::filesystem::path& path) const {
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& [id, f] : features) ids.push_back(id);
  CheckpointWriter writer("features", {{"mel", mel_config}, {"ids", ids}});
  size_t k = 0;
  for (const auto& [id, f] : features) {
    writer.add_tensor("mel" + std::to_string(k), f.first);
    writer.add_tensor("f0_" + std::to_string(k), torch::tensor(f.second, torch::kFloat64));
    ++k;
  }
  writer.save(path);
}

FeatureCache FeatureCache::load(const std::filesystem::path& path) {
  CheckpointReader reader(path, "features");
  FeatureCache cache;
  cache.mel_config = reader.meta().at("mel").get<corpus::MelConfig>();
  const auto ids = reader.meta().at("ids").get<std::vector<std::string>>();
  for (size_t k = 0; k < ids.size(); ++k) {
    auto f0 = reader.tensor("f0_" + std::to_string(k)).contiguous();
    std::vector<double> values(f0.data_ptr<double>(), f0.data_ptr<double>() + f0.numel());
    cache.features[ids[k]] = {reader.tensor("mel" + std::to_string(k)), std::move(values)};
  }
  return cache;
}

FeatureCache feature_cache_of(const AcousticDataset& dataset) {
  FeatureCache cache;
  cache.mel_config = dataset.mel_config;
  for (const auto& item : dataset.items) cache.features[item.id] = {item.mel, item.f0};
  return cache;
}

}  // namespace itts::train
