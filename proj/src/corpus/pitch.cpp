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

#include "itts/corpus/pitch.hpp"

#include <algorithm>
#include <cmath>

#include "itts/error.hpp"

namespace itts::corpus {

size_t PitchTrack::num_voiced() const {
  return static_cast<size_t>(
      std::count_if(f0.begin(), f0.end(), [](double v) { return v > 0.0; }));
}

PitchTrack AutocorrelationPitchEstimator::estimate(const AudioClip& audio) const {
  if (audio.sample_rate <= 0) {
    throw Error(ErrorCode::kUnsupportedRate, "sample rate must be positive");
  }
  const auto& x = audio.samples;
  const auto n = static_cast<int64_t>(x.size());
  const int64_t frames = 1 + n / cfg_.hop_length;
  const double fs = audio.sample_rate;
  const auto min_lag = std::max<int64_t>(2, static_cast<int64_t>(std::floor(fs / cfg_.f_max)));
  const auto max_lag = static_cast<int64_t>(std::ceil(fs / cfg_.f_min));
  // Correlation span: the frame minus the longest lag, at least two periods
  // of the lowest searchable pitch.
  const int64_t span = std::max<int64_t>(cfg_.frame_length - max_lag, 2 * max_lag);

  auto at = [&](int64_t i) { return (i >= 0 && i < n) ? x[static_cast<size_t>(i)] : 0.0; };

  PitchTrack track;
  track.hop_length = cfg_.hop_length;
  track.sample_rate = audio.sample_rate;
  track.f0.assign(static_cast<size_t>(frames), 0.0);

  std::vector<double> seg(static_cast<size_t>(span + max_lag + 2));
  std::vector<double> nccf(static_cast<size_t>(max_lag + 2), 0.0);
  for (int64_t t = 0; t < frames; ++t) {
    const int64_t start = t * cfg_.hop_length - (span + max_lag) / 2;
    for (size_t i = 0; i < seg.size(); ++i) seg[i] = at(start + static_cast<int64_t>(i));

    double e0 = 0.0;
    for (int64_t i = 0; i < span; ++i) e0 += seg[i] * seg[i];
    if (std::sqrt(e0 / static_cast<double>(span)) < cfg_.silence_rms) continue;

    // Energy of the lagged window, updated incrementally.
    double el = 0.0;
    for (int64_t i = 0; i < span; ++i) el += seg[i + min_lag - 1] * seg[i + min_lag - 1];
    double best = -1.0;
    for (int64_t lag = min_lag - 1; lag <= max_lag + 1; ++lag) {
      if (lag > min_lag - 1) {
        el += seg[lag + span - 1] * seg[lag + span - 1] - seg[lag - 1] * seg[lag - 1];
      }
      double c = 0.0;
      for (int64_t i = 0; i < span; ++i) c += seg[i] * seg[i + lag];
      const double denom = std::sqrt(e0 * std::max(el, 0.0));
      nccf[static_cast<size_t>(lag)] = denom > 0.0 ? c / denom : 0.0;
      if (lag >= min_lag && lag <= max_lag) best = std::max(best, nccf[lag]);
    }
    if (best < cfg_.voicing_threshold) continue;

    int64_t chosen = -1;
    for (int64_t lag = min_lag; lag <= max_lag; ++lag) {
      const double v = nccf[lag];
      if (v >= 0.9 * best && v >= nccf[lag - 1] && v >= nccf[lag + 1]) {
        chosen = lag;
        break;
      }
    }
    if (chosen < 0) continue;
    // Parabolic refinement of the peak position.
    const double a = nccf[chosen - 1], b = nccf[chosen], c = nccf[chosen + 1];
    const double denom = a - 2.0 * b + c;
    double shift = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
    shift = std::clamp(shift, -0.5, 0.5);
    const double f0 = fs / (static_cast<double>(chosen) + shift);
    if (f0 >= cfg_.f_min && f0 <= cfg_.f_max) track.f0[static_cast<size_t>(t)] = f0;
  }
  return track;
}

PitchTrack extract_f0(const AudioClip& audio) {
  static const AutocorrelationPitchEstimator estimator;
  return estimator.estimate(audio);
}

PitchTrack extract_f0(const AudioClip& audio, const PitchEstimator& estimator) {
  return estimator.estimate(audio);
}

}  // namespace itts::corpus
