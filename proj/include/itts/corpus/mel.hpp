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

#include <vector>

#include <json.hpp>

#include "itts/corpus/audio.hpp"

namespace itts::corpus {

struct MelConfig {
  int sample_rate = kTargetSampleRate;
  int n_fft = 1024;
  int hop_length = 256;
  int win_length = 1024;
  int n_mels = 80;
  double f_min = 0.0;
  double f_max = 8000.0;
  // Power floor applied before the log.
  double log_floor = 1e-5;

  // Throws Error{kInvalidArgument} unless hop <= win <= n_fft and
  // f_min < f_max <= sample_rate / 2.
  void validate() const;

  bool operator==(const MelConfig&) const = default;
};

void to_json(nlohmann::json& j, const MelConfig& c);
void from_json(const nlohmann::json& j, MelConfig& c);

// Frames x n_mels log-mel power matrix (float64, CPU).
struct MelSpectrogram {
  torch::Tensor frames;
  MelConfig config;

  int64_t num_frames() const { return frames.size(0); }
  int64_t num_mels() const { return frames.size(1); }
};

// Slaney-style mel scale (linear below 1 kHz, logarithmic above).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// n_mels x (n_fft/2 + 1) triangular filterbank with area normalization.
torch::Tensor mel_filterbank(const MelConfig& cfg);

// Band edges (lower, center, upper) in Hz of each mel filter.
std::vector<std::array<double, 3>> mel_band_edges(const MelConfig& cfg);

// Differentiable log-mel of a batch of waveforms [B, N] (or a single [N]).
// Centered (reflect padded) framing gives 1 + floor(N / hop) frames.
// Returns [B, T, n_mels] (or [T, n_mels]).
torch::Tensor log_mel(const torch::Tensor& waveform, const MelConfig& cfg);

// Throws Error{kInvalidArgument} when the clip is shorter than one window or
// the sample rate disagrees with the config.
MelSpectrogram mel_spectrogram(const AudioClip& audio, const MelConfig& cfg = {});

inline int64_t expected_frames(int64_t num_samples, int hop_length) {
  return 1 + num_samples / hop_length;
}

torch::Tensor to_tensor(const AudioClip& audio);
AudioClip to_clip(const torch::Tensor& samples, int sample_rate);

}  // namespace itts::corpus
