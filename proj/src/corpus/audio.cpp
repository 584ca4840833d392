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

#include "itts/corpus/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <limits>
#include <numeric>
#include <numbers>

#include "itts/error.hpp"

namespace itts::corpus {
namespace {

uint32_t read_u32(const char* p) {
  return static_cast<uint32_t>(static_cast<uint8_t>(p[0])) |
         (static_cast<uint32_t>(static_cast<uint8_t>(p[1])) << 8) |
         (static_cast<uint32_t>(static_cast<uint8_t>(p[2])) << 16) |
         (static_cast<uint32_t>(static_cast<uint8_t>(p[3])) << 24);
}

uint16_t read_u16(const char* p) {
  return static_cast<uint16_t>(static_cast<uint8_t>(p[0]) |
                               (static_cast<uint8_t>(p[1]) << 8));
}

void put_u32(std::ostream& os, uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff),
                     static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

void put_u16(std::ostream& os, uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff),
                     static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// Kaiser-windowed sinc sampled at kTableRes points per zero crossing.
constexpr int kZeroCrossings = 16;
constexpr int kTableRes = 512;
constexpr double kKaiserBeta = 8.6;
constexpr double kRolloff = 0.945;

const std::vector<double>& sinc_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kZeroCrossings * kTableRes + 2, 0.0);
    const double denom = bessel_i0(kKaiserBeta);
    for (int i = 0; i <= kZeroCrossings * kTableRes; ++i) {
      const double u = static_cast<double>(i) / kTableRes;
      const double sinc =
          i == 0 ? 1.0
                 : std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
      const double r = u / kZeroCrossings;
      const double w = bessel_i0(kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
      t[i] = sinc * w;
    }
    return t;
  }();
  return table;
}

double interp_sinc(double u) {
  u = std::abs(u);
  if (u >= kZeroCrossings) return 0.0;
  const auto& table = sinc_table();
  const double pos = u * kTableRes;
  const auto idx = static_cast<size_t>(pos);
  const double frac = pos - static_cast<double>(idx);
  return table[idx] * (1.0 - frac) + table[idx + 1] * frac;
}

}  // namespace

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_wav(data);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

AudioClip decode_wav(std::string_view data) {
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kFormat, "not a RIFF/WAVE file");
  }
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const char* pcm = nullptr;
  size_t pcm_bytes = 0;
  size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const char* chunk = data.data() + pos;
    const uint32_t size = read_u32(chunk + 4);
    const size_t body = pos + 8;
    const size_t avail = std::min<size_t>(size, data.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0 && avail >= 16) {
      format = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      if (format == 0xFFFE && avail >= 26) format = read_u16(chunk + 32);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      pcm = data.data() + body;
      pcm_bytes = avail;
    }
    pos = body + size + (size & 1u);
  }
  if (pcm == nullptr || channels == 0 || rate == 0) {
    throw Error(ErrorCode::kFormat, "missing fmt or data chunk");
  }
  const bool is_float = format == 3 && bits == 32;
  if (!(format == 1 && (bits == 16 || bits == 24 || bits == 32)) && !is_float) {
    throw Error(ErrorCode::kFormat,
                "unsupported WAV encoding (format " +
                    std::to_string(format) + ", " + std::to_string(bits) +
                    " bits)");
  }
  const size_t bytes_per_sample = bits / 8;
  const size_t frames = pcm_bytes / (bytes_per_sample * channels);
  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.samples.resize(frames);
  for (size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (size_t c = 0; c < channels; ++c) {
      const char* p = pcm + (f * channels + c) * bytes_per_sample;
      double v = 0.0;
      if (is_float) {
        float x;
        std::memcpy(&x, p, 4);
        v = x;
      } else if (bits == 16) {
        v = static_cast<int16_t>(read_u16(p)) / 32768.0;
      } else if (bits == 24) {
        int32_t x = static_cast<int32_t>(static_cast<uint8_t>(p[0]) |
                                         (static_cast<uint8_t>(p[1]) << 8) |
                                         (static_cast<uint8_t>(p[2]) << 16));
        if (x & 0x800000) x -= 0x1000000;
        v = x / 8388608.0;
      } else {
        v = static_cast<int32_t>(read_u32(p)) / 2147483648.0;
      }
      acc += v;
    }
    clip.samples[f] = acc / channels;
  }
  return clip;
}

void write_wav(std::ostream& out, const AudioClip& clip) {
  const auto n = static_cast<uint32_t>(clip.samples.size());
  out.write("RIFF", 4);
  put_u32(out, 36 + n * 2);
  out.write("WAVEfmt ", 8);
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, static_cast<uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.write("data", 4);
  put_u32(out, n * 2);
  for (double s : clip.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    put_u16(out, static_cast<uint16_t>(static_cast<int16_t>(
                     std::lround(c * 32767.0))));
  }
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_wav(out, clip);
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

std::string encode_wav(const AudioClip& clip) {
  std::ostringstream out(std::ios::binary);
  write_wav(out, clip);
  return out.str();
}

AudioClip resample(const AudioClip& audio, int target_rate) {
  if (target_rate <= 0) {
    throw Error(ErrorCode::kUnsupportedRate,
                "target sample rate must be positive, got " +
                    std::to_string(target_rate));
  }
  if (audio.sample_rate < 8000) {
    throw Error(ErrorCode::kUnsupportedRate,
                "source sample rate below 8000 Hz: " +
                    std::to_string(audio.sample_rate));
  }
  if (audio.sample_rate == target_rate) return audio;

  const int64_t g = std::gcd(static_cast<int64_t>(audio.sample_rate),
                             static_cast<int64_t>(target_rate));
  const int64_t up = target_rate / g;    // L
  const int64_t down = audio.sample_rate / g;  // M
  const auto n_in = static_cast<int64_t>(audio.samples.size());
  const int64_t n_out = (n_in * up + down / 2) / down;

  // Cutoff relative to the input Nyquist frequency.
  const double fc =
      kRolloff * std::min(1.0, static_cast<double>(target_rate) / audio.sample_rate);
  const double half_width = kZeroCrossings / fc;

  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.assign(static_cast<size_t>(n_out), 0.0);
  for (int64_t n = 0; n < n_out; ++n) {
    const int64_t whole = (n * down) / up;
    const double t = static_cast<double>(whole) +
                     static_cast<double>((n * down) % up) / static_cast<double>(up);
    const auto lo = std::max<int64_t>(0, static_cast<int64_t>(std::ceil(t - half_width)));
    const auto hi = std::min<int64_t>(n_in - 1, static_cast<int64_t>(std::floor(t + half_width)));
    double acc = 0.0;
    for (int64_t k = lo; k <= hi; ++k) {
      acc += audio.samples[static_cast<size_t>(k)] *
             interp_sinc((t - static_cast<double>(k)) * fc);
    }
    out.samples[static_cast<size_t>(n)] = fc * acc;
  }
  return out;
}

AudioClip modulate_tempo(const AudioClip& audio, double factor) {
  if (!(factor > 0.0) || factor > 2.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "tempo factor must lie in (0, 2], got " + std::to_string(factor));
  }
  if (factor == 1.0 || audio.samples.empty()) return audio;

  constexpr int64_t kWindow = 1024;
  constexpr int64_t kSynthesisHop = kWindow / 2;
  constexpr int64_t kTolerance = 256;
  constexpr int64_t kCorrLength = kWindow / 2;

  const auto& x = audio.samples;
  const auto n_in = static_cast<int64_t>(x.size());
  const auto n_out = static_cast<int64_t>(std::llround(static_cast<double>(n_in) / factor));
  const double analysis_hop = static_cast<double>(kSynthesisHop) * factor;

  auto at = [&](int64_t i) {
    return (i >= 0 && i < n_in) ? x[static_cast<size_t>(i)] : 0.0;
  };

  std::vector<double> window(kWindow);
  for (int64_t i = 0; i < kWindow; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / kWindow);
  }

  // Frames start half a window early so the first output samples are covered
  // by two overlapping windows like every other sample.
  const int64_t frames = n_out / kSynthesisHop + 3;
  std::vector<double> acc(static_cast<size_t>((frames + 2) * kSynthesisHop + kWindow), 0.0);
  std::vector<double> norm(acc.size(), 0.0);

  int64_t prev = -kSynthesisHop;
  for (int64_t k = 0; k < frames; ++k) {
    const int64_t nominal =
        static_cast<int64_t>(std::llround(static_cast<double>(k) * analysis_hop)) - kSynthesisHop;
    int64_t chosen = nominal;
    if (k > 0) {
      const int64_t natural = prev + kSynthesisHop;
      double best = -std::numeric_limits<double>::infinity();
      for (int64_t cand = nominal - kTolerance; cand <= nominal + kTolerance; ++cand) {
        double c = 0.0;
        for (int64_t i = 0; i < kCorrLength; ++i) c += at(cand + i) * at(natural + i);
        if (c > best) {
          best = c;
          chosen = cand;
        }
      }
    }
    const int64_t out_start = k * kSynthesisHop;  // offset by +kSynthesisHop
    for (int64_t i = 0; i < kWindow; ++i) {
      acc[static_cast<size_t>(out_start + i)] += window[i] * at(chosen + i);
      norm[static_cast<size_t>(out_start + i)] += window[i];
    }
    prev = chosen;
  }

  AudioClip out;
  out.sample_rate = audio.sample_rate;
  out.samples.resize(static_cast<size_t>(n_out));
  for (int64_t i = 0; i < n_out; ++i) {
    const auto j = static_cast<size_t>(i + kSynthesisHop);
    out.samples[static_cast<size_t>(i)] = norm[j] > 1e-8 ? acc[j] / norm[j] : 0.0;
  }
  return out;
}

}  // namespace itts::corpus
