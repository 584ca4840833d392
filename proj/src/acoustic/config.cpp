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

#include "itts/acoustic/config.hpp"

#include <cmath>
#include <string>

#include "itts/error.hpp"

namespace itts::acoustic {

using nlohmann::json;

void EncoderConfig::validate() const {
  if (num_blocks < 0 || num_heads <= 0 || model_dim <= 0 || ffn_hidden_dim <= 0 ||
      ffn_kernel <= 0 || ffn_kernel % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid EncoderConfig dimensions");
  }
  if (model_dim % num_heads != 0) {
    throw Error(ErrorCode::kInvalidArgument, "model_dim must be divisible by num_heads");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dropout must be in [0, 1)");
  }
}

AcousticConfig AcousticConfig::paper_default(int64_t vocab_size) {
  AcousticConfig c;
  c.vocab_size = vocab_size;
  return c;
}

AcousticConfig AcousticConfig::toy(int64_t vocab_size) {
  AcousticConfig c;
  c.vocab_size = vocab_size;
  for (EncoderConfig* e : {&c.encoder, &c.decoder}) {
    e->num_blocks = 2;
    e->model_dim = 64;
    e->ffn_hidden_dim = 128;
  }
  for (PredictorConfig* p : {&c.duration_predictor, &c.pitch_predictor}) p->filter_size = 32;
  c.attention_dim = 32;
  return c;
}

align::AlignerConfig AcousticConfig::aligner() const {
  return {encoder.model_dim, n_mels, attention_dim, aligner_temperature};
}

void AcousticConfig::validate() const {
  encoder.validate();
  decoder.validate();
  if (vocab_size <= 0) throw Error(ErrorCode::kInvalidArgument, "vocab_size must be positive");
  if (encoder.model_dim != decoder.model_dim) {
    throw Error(ErrorCode::kInvalidArgument, "encoder and decoder widths must match");
  }
  if (n_mels <= 0 || num_speakers < 0 || num_languages < 0 || !(pitch_std > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid AcousticConfig");
  }
}

LossWeights LossWeights::supplementary() {
  LossWeights w;
  w.ssim = 1.0;
  w.asr = 0.5;
  return w;
}

void LossWeights::validate() const {
  for (double v : {align, dur, pitch, binary, ssim, asr}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "loss weights must be finite and non-negative");
    }
  }
}

void to_json(json& j, const EncoderConfig& c) {
  j = {{"num_blocks", c.num_blocks}, {"num_heads", c.num_heads}, {"model_dim", c.model_dim},
       {"ffn_hidden_dim", c.ffn_hidden_dim}, {"ffn_kernel", c.ffn_kernel}, {"dropout", c.dropout}};
}

void from_json(const json& j, EncoderConfig& c) {
  c.num_blocks = j.value("num_blocks", c.num_blocks);
  c.num_heads = j.value("num_heads", c.num_heads);
  c.model_dim = j.value("model_dim", c.model_dim);
  c.ffn_hidden_dim = j.value("ffn_hidden_dim", c.ffn_hidden_dim);
  c.ffn_kernel = j.value("ffn_kernel", c.ffn_kernel);
  c.dropout = j.value("dropout", c.dropout);
}

void to_json(json& j, const PredictorConfig& c) {
  j = {{"filter_size", c.filter_size}, {"kernel_size", c.kernel_size},
       {"num_layers", c.num_layers}, {"dropout", c.dropout}};
}

void from_json(const json& j, PredictorConfig& c) {
  c.filter_size = j.value("filter_size", c.filter_size);
  c.kernel_size = j.value("kernel_size", c.kernel_size);
  c.num_layers = j.value("num_layers", c.num_layers);
  c.dropout = j.value("dropout", c.dropout);
}

void to_json(json& j, const AcousticConfig& c) {
  j = {{"vocab_size", c.vocab_size},
       {"n_mels", c.n_mels},
       {"encoder", c.encoder},
       {"decoder", c.decoder},
       {"duration_predictor", c.duration_predictor},
       {"pitch_predictor", c.pitch_predictor},
       {"attention_dim", c.attention_dim},
       {"aligner_temperature", c.aligner_temperature},
       {"num_speakers", c.num_speakers},
       {"num_languages", c.num_languages},
       {"pitch_mean", c.pitch_mean},
       {"pitch_std", c.pitch_std}};
}

void from_json(const json& j, AcousticConfig& c) {
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.n_mels = j.value("n_mels", c.n_mels);
  if (j.contains("encoder")) c.encoder = j["encoder"].get<EncoderConfig>();
  if (j.contains("decoder")) c.decoder = j["decoder"].get<EncoderConfig>();
  if (j.contains("duration_predictor")) c.duration_predictor = j["duration_predictor"].get<PredictorConfig>();
  if (j.contains("pitch_predictor")) c.pitch_predictor = j["pitch_predictor"].get<PredictorConfig>();
  c.attention_dim = j.value("attention_dim", c.attention_dim);
  c.aligner_temperature = j.value("aligner_temperature", c.aligner_temperature);
  c.num_speakers = j.value("num_speakers", c.num_speakers);
  c.num_languages = j.value("num_languages", c.num_languages);
  c.pitch_mean = j.value("pitch_mean", c.pitch_mean);
  c.pitch_std = j.value("pitch_std", c.pitch_std);
}

void to_json(json& j, const LossWeights& w) {
  j = {{"lambda_align", w.align}, {"lambda_dur", w.dur},       {"lambda_pitch", w.pitch},
       {"lambda_binary", w.binary}, {"lambda_ssim", w.ssim}, {"lambda_asr", w.asr}};
}

void from_json(const json& j, LossWeights& w) {
  w.align = j.value("lambda_align", w.align);
  w.dur = j.value("lambda_dur", w.dur);
  w.pitch = j.value("lambda_pitch", w.pitch);
  w.binary = j.value("lambda_binary", w.binary);
  w.ssim = j.value("lambda_ssim", w.ssim);
  w.asr = j.value("lambda_asr", w.asr);
}

}  // namespace itts::acoustic
