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

#include "itts/eval/metrics.hpp"

#include <cmath>
#include <numbers>

#include "itts/corpus/pitch.hpp"
#include "itts/corpus/text.hpp"
#include "itts/error.hpp"

namespace itts::eval {

namespace {

void require_rate(const corpus::AudioClip& clip, const corpus::MelConfig& cfg) {
  if (clip.sample_rate != cfg.sample_rate) {
    throw Error(ErrorCode::kUnsupportedRate, "metric input must be at " + std::to_string(cfg.sample_rate) +
                                                 " Hz, got " + std::to_string(clip.sample_rate));
  }
}

}  // namespace

double mcd_constant() { return 10.0 * std::numbers::sqrt2 / std::numbers::ln10; }

Sequence mel_cepstra(const torch::Tensor& log_mel, int count) {
  if (log_mel.dim() != 2) throw Error(ErrorCode::kShapeMismatch, "mel must be [T, n_mels]");
  const int64_t n = log_mel.size(1);
  if (count < 1 || count >= n) throw Error(ErrorCode::kInvalidArgument, "cepstrum count must lie in [1, n_mels)");
  auto mel = log_mel.to(torch::kFloat64).contiguous();
  auto acc = mel.accessor<double, 2>();
  Sequence out(static_cast<size_t>(mel.size(0)), std::vector<double>(static_cast<size_t>(count)));
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  for (int64_t t = 0; t < mel.size(0); ++t) {
    for (int k = 1; k <= count; ++k) {
      double s = 0.0;
      for (int64_t m = 0; m < n; ++m) {
        s += acc[t][m] * std::cos(std::numbers::pi * k * (2.0 * static_cast<double>(m) + 1.0) /
                                  (2.0 * static_cast<double>(n)));
      }
      out[static_cast<size_t>(t)][static_cast<size_t>(k - 1)] = scale * s;
    }
  }
  return out;
}

double mcd_from_cepstra(const Sequence& ref, const Sequence& syn, bool fast) {
  const auto path = fast ? fast_dtw(ref, syn, DtwMetric::kL2) : dtw(ref, syn, DtwMetric::kL2);
  double sum = 0.0;
  for (const auto& [i, j] : path.pairs) sum += frame_distance(ref[i], syn[j], DtwMetric::kL2);
  return mcd_constant() * sum / static_cast<double>(path.pairs.size());
}

double mcd(const corpus::AudioClip& ref, const corpus::AudioClip& syn, const corpus::MelConfig& cfg,
           bool fast) {
  require_rate(ref, cfg);
  require_rate(syn, cfg);
  const auto a = mel_cepstra(corpus::mel_spectrogram(ref, cfg).frames);
  const auto b = mel_cepstra(corpus::mel_spectrogram(syn, cfg).frames);
  return mcd_from_cepstra(a, b, fast);
}

double log_f0_rmse_tracks(const std::vector<double>& ref_f0, const std::vector<double>& syn_f0, bool fast) {
  std::vector<double> a, b;
  for (double f : ref_f0) {
    if (f > 0.0) a.push_back(std::log(f));
  }
  for (double f : syn_f0) {
    if (f > 0.0) b.push_back(std::log(f));
  }
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::kUndefinedMetric, "log-F0 RMSE needs voiced frames in both tracks");
  }
  const auto sa = as_sequence(a), sb = as_sequence(b);
  const auto path = fast ? fast_dtw(sa, sb, DtwMetric::kL1) : dtw(sa, sb, DtwMetric::kL1);
  double sq = 0.0;
  for (const auto& [i, j] : path.pairs) sq += (a[i] - b[j]) * (a[i] - b[j]);
  return std::sqrt(sq / static_cast<double>(path.pairs.size()));
}

double log_f0_rmse(const corpus::AudioClip& ref, const corpus::AudioClip& syn, bool fast) {
  if (ref.sample_rate != syn.sample_rate) {
    throw Error(ErrorCode::kUnsupportedRate, "log-F0 RMSE inputs differ in sample rate");
  }
  return log_f0_rmse_tracks(corpus::extract_f0(ref).f0, corpus::extract_f0(syn).f0, fast);
}

std::string cer_normalize(std::string_view text) { return corpus::nfc(corpus::normalize_text(text)); }

size_t edit_distance(const std::u32string& a, const std::u32string& b) {
  std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double cer(std::string_view ref_text, std::string_view hyp_text) {
  const auto ref = corpus::to_code_points(cer_normalize(ref_text));
  if (ref.empty()) throw Error(ErrorCode::kInvalidArgument, "CER reference is empty");
  const auto hyp = corpus::to_code_points(cer_normalize(hyp_text));
  return static_cast<double>(edit_distance(ref, hyp)) / static_cast<double>(ref.size());
}

}  // namespace itts::eval
