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

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "itts/align/aligner.hpp"

namespace itts::acoustic {

// Feed-forward Transformer stack. ffn_hidden_dim is the inner width of the
// convolutional feed-forward sublayer; model_dim is the residual width.
struct EncoderConfig {
  int64_t num_blocks = 6;
  int64_t num_heads = 1;
  int64_t model_dim = 384;
  int64_t ffn_hidden_dim = 1024;
  int64_t ffn_kernel = 3;
  double dropout = 0.1;

  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

struct PredictorConfig {
  int64_t filter_size = 256;
  int64_t kernel_size = 3;
  int64_t num_layers = 2;
  double dropout = 0.1;
  bool operator==(const PredictorConfig&) const = default;
};

struct AcousticConfig {
  int64_t vocab_size = 0;
  int64_t n_mels = 80;
  EncoderConfig encoder;
  EncoderConfig decoder;
  PredictorConfig duration_predictor;
  PredictorConfig pitch_predictor;
  int64_t attention_dim = 80;
  double aligner_temperature = 0.0005;
  // 0 disables the corresponding conditioning table.
  int64_t num_speakers = 0;
  int64_t num_languages = 0;
  // Per-token pitch targets are standardized with these statistics (Hz).
  double pitch_mean = 0.0;
  double pitch_std = 1.0;

  // Full-size encoder/decoder (6 blocks, 1 head, width 384, FFN 1024).
  static AcousticConfig paper_default(int64_t vocab_size);
  // Width 64, 2 blocks per stack, small predictors; for CPU tests.
  static AcousticConfig toy(int64_t vocab_size);

  align::AlignerConfig aligner() const;
  void validate() const;
};

struct ConditioningIds {
  std::optional<int64_t> speaker_id;
  std::optional<int64_t> language_id;
};

struct LossWeights {
  double align = 1.0;
  double dur = 0.1;
  double pitch = 0.1;
  double binary = 0.1;
  double ssim = 0.0;
  double asr = 0.0;

  // Adds SSIM (1.0) and ASR-consistency (0.5) terms.
  static LossWeights supplementary();
  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

void to_json(nlohmann::json& j, const EncoderConfig& c);
void from_json(const nlohmann::json& j, EncoderConfig& c);
void to_json(nlohmann::json& j, const PredictorConfig& c);
void from_json(const nlohmann::json& j, PredictorConfig& c);
void to_json(nlohmann::json& j, const AcousticConfig& c);
void from_json(const nlohmann::json& j, AcousticConfig& c);
void to_json(nlohmann::json& j, const LossWeights& w);
void from_json(const nlohmann::json& j, LossWeights& w);

}  // namespace itts::acoustic
