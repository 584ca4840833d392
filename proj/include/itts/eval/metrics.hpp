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

#include <string>
#include <string_view>
#include <vector>

#include "itts/corpus/audio.hpp"
#include "itts/corpus/mel.hpp"
#include "itts/eval/dtw.hpp"

namespace itts::eval {

inline constexpr int kNumCepstra = 13;

// 10 * sqrt(2) / ln(10)
double mcd_constant();

// Mel-cepstra c_1..c_count of each frame of a [T, n_mels] natural-log mel
// matrix (orthonormal DCT-II along the mel axis; c_0 is dropped).
Sequence mel_cepstra(const torch::Tensor& log_mel, int count = kNumCepstra);

// Mean over DTW-aligned pairs (L2 distance) of K * ||c - c'||.
double mcd_from_cepstra(const Sequence& ref, const Sequence& syn, bool fast = false);

// Both clips must be at cfg.sample_rate (Error{kUnsupportedRate}) and at
// least one window long (Error{kInvalidArgument}).
double mcd(const corpus::AudioClip& ref, const corpus::AudioClip& syn, const corpus::MelConfig& cfg = {},
           bool fast = false);

// Voiced frames of each track are DTW-aligned on |ln f - ln f'|; returns
// sqrt(mean over aligned pairs of (ln f - ln f')^2). Throws
// Error{kUndefinedMetric} when either track has no voiced frame.
double log_f0_rmse_tracks(const std::vector<double>& ref_f0, const std::vector<double>& syn_f0,
                          bool fast = false);
double log_f0_rmse(const corpus::AudioClip& ref, const corpus::AudioClip& syn, bool fast = false);

// Text compared by CER: normalize_text then NFC.
std::string cer_normalize(std::string_view text);
// Levenshtein distance over code points.
size_t edit_distance(const std::u32string& a, const std::u32string& b);
// edit_distance / |ref| on normalized text. Throws Error{kInvalidArgument}
// when the normalized reference is empty.
double cer(std::string_view ref_text, std::string_view hyp_text);

}  // namespace itts::eval
