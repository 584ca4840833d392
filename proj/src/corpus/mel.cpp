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

#include "itts/corpus/mel.hpp"

#include <cmath>
#include <string>

#include "itts/error.hpp"

namespace itts::corpus {
namespace {

constexpr double kLinearSlope = 200.0 / 3.0;  // Hz per mel below 1 kHz
constexpr double kBreakHz = 1000.0;
constexpr double kBreakMel = kBreakHz / kLinearSlope;
const double kLogStep = std::log(6.4) / 27.0;

std::vector<double> band_points(const MelConfig& cfg) {
  const double lo = hz_to_mel(cfg.f_min);
  const double hi = hz_to_mel(cfg.f_max);
  std::vector<double> hz(static_cast<size_t>(cfg.n_mels + 2));
  for (size_t i = 0; i < hz.size(); ++i) {
    hz[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) /
                               static_cast<double>(cfg.n_mels + 1));
  }
  return hz;
}

}  // namespace

void MelConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "invalid MelConfig: " + what);
  };
  if (sample_rate <= 0) fail("sample_rate must be positive");
  if (hop_length <= 0 || hop_length > win_length) fail("need 0 < hop_length <= win_length");
  if (win_length > n_fft) fail("need win_length <= n_fft");
  if (n_mels <= 0) fail("n_mels must be positive");
  if (!(f_min >= 0.0 && f_min < f_max)) fail("need 0 <= f_min < f_max");
  if (f_max > sample_rate / 2.0) fail("f_max exceeds Nyquist");
  if (!(log_floor > 0.0)) fail("log_floor must be positive");
}

double hz_to_mel(double hz) {
  if (hz < kBreakHz) return hz / kLinearSlope;
  return kBreakMel + std::log(hz / kBreakHz) / kLogStep;
}

double mel_to_hz(double mel) {
  if (mel < kBreakMel) return mel * kLinearSlope;
  return kBreakHz * std::exp(kLogStep * (mel - kBreakMel));
}

std::vector<std::array<double, 3>> mel_band_edges(const MelConfig& cfg) {
  const auto hz = band_points(cfg);
  std::vector<std::array<double, 3>> edges(static_cast<size_t>(cfg.n_mels));
  for (size_t i = 0; i < edges.size(); ++i) edges[i] = {hz[i], hz[i + 1], hz[i + 2]};
  return edges;
}

torch::Tensor mel_filterbank(const MelConfig& cfg) {
  cfg.validate();
  const int64_t bins = cfg.n_fft / 2 + 1;
  const auto hz = band_points(cfg);
  auto fb = torch::zeros({cfg.n_mels, bins}, torch::kFloat64);
  auto acc = fb.accessor<double, 2>();
  for (int64_t m = 0; m < cfg.n_mels; ++m) {
    const double lo = hz[m], center = hz[m + 1], hi = hz[m + 2];
    const double enorm = 2.0 / (hi - lo);
    for (int64_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / cfg.n_fft;
      const double rise = (f - lo) / (center - lo);
      const double fall = (hi - f) / (hi - center);
      acc[m][k] = std::max(0.0, std::min(rise, fall)) * enorm;
    }
  }
  return fb;
}

torch::Tensor log_mel(const torch::Tensor& waveform, const MelConfig& cfg) {
  cfg.validate();
  const bool batched = waveform.dim() == 2;
  auto x = batched ? waveform : waveform.unsqueeze(0);
  if (x.size(1) < cfg.win_length) {
    throw Error(ErrorCode::kInvalidArgument,
                "audio shorter than one analysis window (" +
                    std::to_string(x.size(1)) + " < " +
                    std::to_string(cfg.win_length) + " samples)");
  }
  const auto opts = x.options();
  auto window = torch::hann_window(cfg.win_length, /*periodic=*/true, opts);
  auto spec = torch::stft(x, cfg.n_fft, cfg.hop_length, cfg.win_length, window,
                          /*center=*/true, "reflect", /*normalized=*/false,
                          /*onesided=*/true, /*return_complex=*/true);
  auto power = torch::real(spec).square() + torch::imag(spec).square();  // [B, F, T]
  auto fb = mel_filterbank(cfg).to(opts.dtype());
  auto mel = torch::matmul(fb, power).transpose(1, 2);  // [B, T, n_mels]
  auto out = torch::log(torch::clamp_min(mel, cfg.log_floor));
  return batched ? out : out.squeeze(0);
}

MelSpectrogram mel_spectrogram(const AudioClip& audio, const MelConfig& cfg) {
  cfg.validate();
  if (audio.sample_rate != cfg.sample_rate) {
    throw Error(ErrorCode::kInvalidArgument,
                "audio sample rate " + std::to_string(audio.sample_rate) +
                    " does not match mel config " +
                    std::to_string(cfg.sample_rate));
  }
  torch::NoGradGuard no_grad;
  return {log_mel(to_tensor(audio), cfg), cfg};
}

torch::Tensor to_tensor(const AudioClip& audio) {
  return torch::tensor(audio.samples, torch::kFloat64);
}

AudioClip to_clip(const torch::Tensor& samples, int sample_rate) {
  auto flat = samples.detach().to(torch::kFloat64).contiguous().view({-1});
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.assign(flat.data_ptr<double>(), flat.data_ptr<double>() + flat.numel());
  return clip;
}

void to_json(nlohmann::json& j, const MelConfig& c) {
  j = {{"sample_rate", c.sample_rate}, {"n_fft", c.n_fft}, {"hop_length", c.hop_length},
       {"win_length", c.win_length}, {"n_mels", c.n_mels}, {"f_min", c.f_min},
       {"f_max", c.f_max}, {"log_floor", c.log_floor}};
}

void from_json(const nlohmann::json& j, MelConfig& c) {
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.n_fft = j.value("n_fft", c.n_fft);
  c.hop_length = j.value("hop_length", c.hop_length);
  c.win_length = j.value("win_length", c.win_length);
  c.n_mels = j.value("n_mels", c.n_mels);
  c.f_min = j.value("f_min", c.f_min);
  c.f_max = j.value("f_max", c.f_max);
  c.log_floor = j.value("log_floor", c.log_floor);
}

}  // namespace itts::corpus
