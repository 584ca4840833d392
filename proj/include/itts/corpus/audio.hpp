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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace itts::corpus {

inline constexpr int kTargetSampleRate = 22050;

// Mono waveform with samples nominally in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kTargetSampleRate;

  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
  bool empty() const { return samples.empty(); }
};

// Reads 16-bit PCM (also 24/32-bit PCM and 32-bit float) RIFF/WAVE files.
// Multi-channel input is averaged down to mono.
AudioClip read_wav(const std::filesystem::path& path);

// In-memory form of read_wav.
AudioClip decode_wav(std::string_view bytes);
// Writes 16-bit PCM mono; samples are clipped to [-1, 1].
void write_wav(const std::filesystem::path& path, const AudioClip& clip);
void write_wav(std::ostream& out, const AudioClip& clip);
std::string encode_wav(const AudioClip& clip);

// Band-limited windowed-sinc (Kaiser) rational resampler. The output holds
// round(n * target / source) samples. Requires source rate >= 8000.
AudioClip resample(const AudioClip& audio, int target_rate);

// Pitch-preserving time stretch (WSOLA). factor < 1 slows speech down; the
// output length is round(n / factor). Requires 0 < factor <= 2.
AudioClip modulate_tempo(const AudioClip& audio, double factor);

}  // namespace itts::corpus
