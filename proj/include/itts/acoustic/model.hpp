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

#include <optional>
#include <vector>

#include "itts/acoustic/config.hpp"
#include "itts/acoustic/layers.hpp"
#include "itts/align/aligner.hpp"
#include "itts/corpus/mel.hpp"

namespace itts::acoustic {

struct EncoderOutput {
  torch::Tensor h;           // [T_text, d], conditioned
  torch::Tensor embeddings;  // [T_text, d], bare token embeddings (aligner input)
};

struct ProsodyPrediction {
  torch::Tensor pitch;         // [T_text], standardized pitch
  torch::Tensor log_duration;  // [T_text]
};

struct TrainingTargets {
  torch::Tensor mel;        // [T_mel, n_mels]
  std::vector<double> f0;   // per mel frame, Hz, 0 = unvoiced
  // Used instead of the aligner's Viterbi path when set.
  std::optional<align::DurationVector> fixed_durations;
};

struct TrainingOutput {
  torch::Tensor mel_hat;       // [sum(durations), n_mels]
  ProsodyPrediction prosody;
  torch::Tensor pitch_target;  // [T_text], standardized
  std::optional<align::SoftAlignment> soft;
  std::optional<align::HardAlignment> hard;
  align::DurationVector durations;
};

struct AcousticOutput {
  corpus::MelSpectrogram mel_hat;
  torch::Tensor pitch_hat;
  torch::Tensor log_duration_hat;
  align::DurationVector durations;
};

// Repeats row i of h durations[i] times. Throws Error{kInvalidArgument} if
// every duration is zero and Error{kShapeMismatch} on a length mismatch.
torch::Tensor length_regulate(const torch::Tensor& h, const align::DurationVector& durations);

// Mean voiced F0 over each token's frames; 0 when none are voiced.
std::vector<double> token_pitch(const std::vector<double>& f0, const align::DurationVector& durations);

// max(1, round(exp(log_duration))) per token.
align::DurationVector inference_durations(const torch::Tensor& log_duration, double pace = 1.0);

// FastPitch-style acoustic model with a learned aligner. Speaker and
// language embeddings are added to every row of the encoder output; the
// aligner consumes only the bare token embeddings.
class FastPitchImpl : public torch::nn::Module {
 public:
  explicit FastPitchImpl(const AcousticConfig& cfg);

  // Throws Error{kInvalidArgument} for empty input and Error{kOutOfRange}
  // for token, speaker or language ids outside their tables.
  EncoderOutput encode_text(const std::vector<int64_t>& tokens, const ConditioningIds& cond);
  ProsodyPrediction predict_prosody(const torch::Tensor& h);
  // h + pitch embedding of the [T_text] standardized pitch.
  torch::Tensor add_pitch(const torch::Tensor& h, const torch::Tensor& pitch);
  // [T_mel, d] -> [T_mel, n_mels]
  torch::Tensor decode_mel(const torch::Tensor& upsampled);

  // Teacher-forced pass. With use_aligner the durations come from the
  // Viterbi path of the soft alignment, otherwise from fixed_durations.
  TrainingOutput forward_train(const std::vector<int64_t>& tokens, const ConditioningIds& cond,
                               const TrainingTargets& targets, bool use_aligner);

  AcousticOutput infer(const std::vector<int64_t>& tokens, const ConditioningIds& cond,
                       const corpus::MelConfig& mel_cfg = {}, double pace = 1.0);

  double normalize_pitch(double hz) const;
  const AcousticConfig& config() const { return cfg_; }
  align::Aligner& aligner() { return aligner_; }

 private:
  AcousticConfig cfg_;
  torch::nn::Embedding embedding_{nullptr};
  torch::nn::Embedding speaker_embedding_{nullptr};
  torch::nn::Embedding language_embedding_{nullptr};
  FFTransformer encoder_{nullptr};
  FFTransformer decoder_{nullptr};
  TemporalPredictor duration_predictor_{nullptr};
  TemporalPredictor pitch_predictor_{nullptr};
  torch::nn::Conv1d pitch_embedding_{nullptr};
  torch::nn::Linear mel_projection_{nullptr};
  align::Aligner aligner_{nullptr};
};
TORCH_MODULE(FastPitch);

}  // namespace itts::acoustic
