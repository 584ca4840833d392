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

#include "itts/acoustic/model.hpp"

#include <cmath>
#include <string>

#include "itts/error.hpp"

namespace itts::acoustic {

namespace nn = torch::nn;

torch::Tensor length_regulate(const torch::Tensor& h, const align::DurationVector& durations) {
  if (static_cast<int64_t>(durations.size()) != h.size(0)) {
    throw Error(ErrorCode::kShapeMismatch,
                "durations cover " + std::to_string(durations.size()) + " tokens, h has " +
                    std::to_string(h.size(0)) + " rows");
  }
  for (int64_t d : durations.frames) {
    if (d < 0) throw Error(ErrorCode::kInvalidArgument, "negative duration");
  }
  if (durations.total() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "length regulation with all-zero durations");
  }
  auto repeats = torch::tensor(durations.frames, torch::kInt64);
  return torch::repeat_interleave(h, repeats, /*dim=*/0);
}

std::vector<double> token_pitch(const std::vector<double>& f0, const align::DurationVector& durations) {
  if (static_cast<size_t>(durations.total()) != f0.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "durations sum to " + std::to_string(durations.total()) + " but the pitch track has " +
                    std::to_string(f0.size()) + " frames");
  }
  std::vector<double> out(durations.size(), 0.0);
  size_t frame = 0;
  for (size_t i = 0; i < durations.size(); ++i) {
    double sum = 0.0;
    int voiced = 0;
    for (int64_t k = 0; k < durations.frames[i]; ++k, ++frame) {
      if (f0[frame] > 0.0) {
        sum += f0[frame];
        ++voiced;
      }
    }
    out[i] = voiced > 0 ? sum / voiced : 0.0;
  }
  return out;
}

align::DurationVector inference_durations(const torch::Tensor& log_duration, double pace) {
  auto d = log_duration.detach().to(torch::kFloat64).contiguous();
  align::DurationVector out;
  out.frames.reserve(static_cast<size_t>(d.numel()));
  for (int64_t i = 0; i < d.numel(); ++i) {
    const double frames = std::exp(d.data_ptr<double>()[i]) / pace;
    out.frames.push_back(std::max<int64_t>(1, std::llround(frames)));
  }
  return out;
}

FastPitchImpl::FastPitchImpl(const AcousticConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  const int64_t d = cfg.encoder.model_dim;
  embedding_ = register_module("embedding", nn::Embedding(cfg.vocab_size, d));
  if (cfg.num_speakers > 0) {
    speaker_embedding_ = register_module("speaker_embedding", nn::Embedding(cfg.num_speakers, d));
  }
  if (cfg.num_languages > 0) {
    language_embedding_ = register_module("language_embedding", nn::Embedding(cfg.num_languages, d));
  }
  encoder_ = register_module("encoder", FFTransformer(cfg.encoder));
  duration_predictor_ = register_module("duration_predictor", TemporalPredictor(d, cfg.duration_predictor));
  pitch_predictor_ = register_module("pitch_predictor", TemporalPredictor(d, cfg.pitch_predictor));
  pitch_embedding_ = register_module("pitch_embedding", nn::Conv1d(nn::Conv1dOptions(1, d, 3).padding(1)));
  decoder_ = register_module("decoder", FFTransformer(cfg.decoder));
  mel_projection_ = register_module("mel_projection", nn::Linear(d, cfg.n_mels));
  aligner_ = register_module("aligner", align::Aligner(cfg.aligner()));
  to(torch::kFloat64);
}

double FastPitchImpl::normalize_pitch(double hz) const {
  return hz > 0.0 ? (hz - cfg_.pitch_mean) / cfg_.pitch_std : 0.0;
}

EncoderOutput FastPitchImpl::encode_text(const std::vector<int64_t>& tokens, const ConditioningIds& cond) {
  if (tokens.empty()) throw Error(ErrorCode::kInvalidArgument, "empty token sequence");
  for (int64_t t : tokens) {
    if (t < 0 || t >= cfg_.vocab_size) {
      throw Error(ErrorCode::kOutOfRange, "token id " + std::to_string(t) + " outside vocabulary");
    }
  }
  auto check = [](const std::optional<int64_t>& id, int64_t table, const char* what) {
    if (id && (*id < 0 || *id >= table)) {
      throw Error(ErrorCode::kOutOfRange, std::string(what) + " id " + std::to_string(*id) +
                                              " outside table of size " + std::to_string(table));
    }
  };
  check(cond.speaker_id, cfg_.num_speakers, "speaker");
  check(cond.language_id, cfg_.num_languages, "language");

  const auto device = embedding_->weight.device();
  auto ids = torch::tensor(tokens, torch::TensorOptions(torch::kInt64).device(device));
  EncoderOutput out;
  out.embeddings = embedding_(ids);
  out.h = encoder_(out.embeddings);
  if (cond.speaker_id) out.h = out.h + speaker_embedding_->weight[*cond.speaker_id].unsqueeze(0);
  if (cond.language_id) out.h = out.h + language_embedding_->weight[*cond.language_id].unsqueeze(0);
  return out;
}

ProsodyPrediction FastPitchImpl::predict_prosody(const torch::Tensor& h) {
  return {pitch_predictor_(h), duration_predictor_(h)};
}

torch::Tensor FastPitchImpl::add_pitch(const torch::Tensor& h, const torch::Tensor& pitch) {
  auto emb = pitch_embedding_(pitch.view({1, 1, -1}).to(h.scalar_type())).squeeze(0).t();
  return h + emb;
}

torch::Tensor FastPitchImpl::decode_mel(const torch::Tensor& upsampled) {
  if (upsampled.dim() != 2 || upsampled.size(0) == 0) {
    throw Error(ErrorCode::kInvalidArgument, "decoder input must be a non-empty [T_mel, d] matrix");
  }
  return mel_projection_(decoder_(upsampled));
}

TrainingOutput FastPitchImpl::forward_train(const std::vector<int64_t>& tokens, const ConditioningIds& cond,
                                            const TrainingTargets& targets, bool use_aligner) {
  if (targets.mel.dim() != 2 || targets.mel.size(1) != cfg_.n_mels) {
    throw Error(ErrorCode::kShapeMismatch, "target mel must be [T_mel, n_mels]");
  }
  if (static_cast<int64_t>(targets.f0.size()) != targets.mel.size(0)) {
    throw Error(ErrorCode::kShapeMismatch, "pitch track and mel frame counts differ");
  }
  TrainingOutput out;
  auto enc = encode_text(tokens, cond);
  if (use_aligner) {
    out.soft = aligner_(enc.embeddings, targets.mel);
    out.hard = align::viterbi_hard(*out.soft);
    out.durations = align::durations_from_hard(*out.hard);
  } else {
    if (!targets.fixed_durations) {
      throw Error(ErrorCode::kInvalidArgument, "aligner disabled but no fixed durations supplied");
    }
    out.durations = *targets.fixed_durations;
  }
  const auto hz = token_pitch(targets.f0, out.durations);
  std::vector<double> norm(hz.size());
  for (size_t i = 0; i < hz.size(); ++i) norm[i] = normalize_pitch(hz[i]);
  out.pitch_target = torch::tensor(norm, enc.h.options());

  out.prosody = predict_prosody(enc.h);
  auto upsampled = length_regulate(add_pitch(enc.h, out.pitch_target), out.durations);
  out.mel_hat = decode_mel(upsampled);
  return out;
}

AcousticOutput FastPitchImpl::infer(const std::vector<int64_t>& tokens, const ConditioningIds& cond,
                                    const corpus::MelConfig& mel_cfg, double pace) {
  if (mel_cfg.n_mels != cfg_.n_mels) {
    throw Error(ErrorCode::kShapeMismatch, "mel config n_mels differs from the model");
  }
  torch::NoGradGuard no_grad;
  auto enc = encode_text(tokens, cond);
  auto prosody = predict_prosody(enc.h);
  auto durations = inference_durations(prosody.log_duration, pace);
  auto upsampled = length_regulate(add_pitch(enc.h, prosody.pitch), durations);
  AcousticOutput out;
  out.mel_hat = {decode_mel(upsampled), mel_cfg};
  out.pitch_hat = prosody.pitch;
  out.log_duration_hat = prosody.log_duration;
  out.durations = std::move(durations);
  return out;
}

}  // namespace itts::acoustic
