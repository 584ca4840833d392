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

#include <memory>
#include <vector>

#include "itts/corpus/audio.hpp"

namespace itts::corpus {

// Per-frame F0 in Hz, 0 for unvoiced frames. Frame t is centered on sample
// t * hop_length, matching the mel framing.
struct PitchTrack {
  std::vector<double> f0;
  int hop_length = 256;
  int sample_rate = kTargetSampleRate;

  size_t num_frames() const { return f0.size(); }
  size_t num_voiced() const;
};

struct PitchConfig {
  int hop_length = 256;
  int frame_length = 1024;
  double f_min = 65.0;
  double f_max = 600.0;
  double voicing_threshold = 0.3;
  // Frames whose RMS falls below this are unvoiced regardless of periodicity.
  double silence_rms = 1e-4;
};

class PitchEstimator {
 public:
  virtual ~PitchEstimator() = default;
  virtual PitchTrack estimate(const AudioClip& audio) const = 0;
};

// Normalized cross-correlation pitch tracker. The smallest lag whose peak is
// within 10% of the best peak wins, which suppresses sub-octave errors.
class AutocorrelationPitchEstimator final : public PitchEstimator {
 public:
  explicit AutocorrelationPitchEstimator(PitchConfig cfg = {}) : cfg_(cfg) {}
  PitchTrack estimate(const AudioClip& audio) const override;
  const PitchConfig& config() const { return cfg_; }

 private:
  PitchConfig cfg_;
};

// Default estimator at default settings.
PitchTrack extract_f0(const AudioClip& audio);
PitchTrack extract_f0(const AudioClip& audio, const PitchEstimator& estimator);

}  // namespace itts::corpus
