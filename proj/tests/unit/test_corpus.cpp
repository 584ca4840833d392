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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "itts/corpus/audio.hpp"
#include "itts/corpus/frontend.hpp"
#include "itts/corpus/manifest.hpp"
#include "itts/corpus/mel.hpp"
#include "itts/corpus/pitch.hpp"
#include "itts/corpus/text.hpp"
#include "itts/corpus/transliterate.hpp"
#include "itts/error.hpp"
#include "test_support.hpp"

using namespace itts;
using namespace itts::corpus;
using itts::testing::sine;
using itts::testing::silence;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected itts::Error");
  return ErrorCode::kExternal;
}

// Slaney mel scale, written out independently of the library.
double slaney_mel(double hz) {
  const double f_sp = 200.0 / 3.0;
  if (hz < 1000.0) return hz / f_sp;
  return 1000.0 / f_sp + std::log(hz / 1000.0) / (std::log(6.4) / 27.0);
}

std::vector<std::pair<std::string, std::string>> golden_pairs() {
  std::ifstream in(ITTS_FIXTURE_DIR "/devanagari_demo.tsv");
  REQUIRE(in.good());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

}  // namespace

TEST_CASE("normalize_text replaces, strips and collapses") {
  CHECK(normalize_text("a; b: c") == "a, b, c");
  CHECK(normalize_text("(hello)") == "hello");
  CHECK(normalize_text("a   b") == "a b");
  CHECK(normalize_text("  \t lead and trail \n ") == "lead and trail");
  CHECK(normalize_text("") == "");
}

TEST_CASE("normalize_text is idempotent and leaves no forbidden characters") {
  const std::string alphabet = "ab ;:()\t\n,.";
  std::mt19937 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const int len = static_cast<int>(rng() % 16);
    for (int i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
    const auto once = normalize_text(s);
    CHECK(normalize_text(once) == once);
    CHECK(once.find_first_of(";:()") == std::string::npos);
    CHECK(once.find("  ") == std::string::npos);
  }
}

TEST_CASE("nfc composes canonically equivalent sequences") {
  // "ka" + nukta decomposed vs precomposed QA (U+0958 decomposes under NFC).
  CHECK(nfc("\xE0\xA4\x95\xE0\xA4\xBC") == nfc("\xE0\xA5\x98"));
  CHECK(nfc("e\xCC\x81") == "\xC3\xA9");
}

TEST_CASE("resample") {
  SUBCASE("identity at equal rates") {
    const auto clip = sine(300.0, 0.1);
    const auto out = resample(clip, 22050);
    CHECK(out.samples == clip.samples);
  }
  SUBCASE("44.1 kHz one second gives 22050 samples") {
    const auto out = resample(sine(440.0, 1.0, 44100), 22050);
    CHECK(out.sample_rate == 22050);
    CHECK(out.samples.size() == 22050);
  }
  SUBCASE("sine peak frequency survives") {
    const auto out = resample(sine(440.0, 0.5, 44100), 22050);
    CHECK(std::abs(testing::dft_peak_hz(out, 400.0, 480.0) - 440.0) <= 2.0);
  }
  SUBCASE("duration preserved within a sample period for odd ratios") {
    const auto in = sine(200.0, 0.73, 16000);
    const auto out = resample(in, 22050);
    CHECK(std::abs(out.duration() - in.duration()) <= 1.0 / 22050 + 1e-12);
  }
  SUBCASE("rate errors") {
    CHECK(code_of([] { resample(sine(100.0, 0.1), 0); }) == ErrorCode::kUnsupportedRate);
    CHECK(code_of([] { resample(sine(100.0, 0.1, 4000), 22050); }) == ErrorCode::kUnsupportedRate);
  }
}

TEST_CASE("filter_utterances is inclusive and order preserving") {
  Manifest m;
  for (double d : {5.0, 21.0, 20.0, 1.0}) {
    Utterance u;
    u.id = "u" + std::to_string(m.size());
    u.duration = d;
    m.utterances.push_back(u);
  }
  const auto out = filter_utterances(m, 20.0);
  REQUIRE(out.size() == 3);
  CHECK(out.utterances[0].id == "u0");
  CHECK(out.utterances[1].id == "u2");
  CHECK(out.utterances[2].id == "u3");
  CHECK(filter_utterances(Manifest{}, 20.0).empty());
}

TEST_CASE("mel spectrogram") {
  const MelConfig cfg;
  SUBCASE("silence hits the floor everywhere") {
    const auto mel = mel_spectrogram(silence(0.5), cfg);
    CHECK(mel.frames.eq(std::log(cfg.log_floor)).all().item<bool>());
  }
  SUBCASE("frame count under centered framing") {
    CHECK(mel_spectrogram(sine(100.0, 1.0), cfg).num_frames() == 87);
    CHECK(expected_frames(22050, 256) == 87);
    for (int n : {1024, 1025, 5000, 8192}) {
      corpus::AudioClip clip = silence(0.0);
      clip.samples.assign(static_cast<size_t>(n), 0.0);
      CHECK(mel_spectrogram(clip, cfg).num_frames() == 1 + n / 256);
    }
  }
  SUBCASE("440 Hz sine peaks in the bin centred nearest 440 Hz") {
    const auto mel = mel_spectrogram(sine(440.0, 0.5), cfg);
    const double lo = slaney_mel(cfg.f_min), hi = slaney_mel(cfg.f_max);
    const double target = slaney_mel(440.0);
    int nearest = 0;
    double best = 1e30;
    for (int b = 0; b < cfg.n_mels; ++b) {
      const double center = lo + (hi - lo) * (b + 1) / (cfg.n_mels + 1);
      if (std::abs(center - target) < best) {
        best = std::abs(center - target);
        nearest = b;
      }
    }
    const auto argmax = mel.frames.argmax(1);
    for (int64_t t = 2; t < mel.num_frames() - 2; ++t) CHECK(argmax[t].item<int64_t>() == nearest);
  }
  SUBCASE("deterministic and finite") {
    const auto a = mel_spectrogram(testing::vowel_sweep(0.4), cfg);
    const auto b = mel_spectrogram(testing::vowel_sweep(0.4), cfg);
    CHECK(torch::equal(a.frames, b.frames));
    CHECK(torch::isfinite(a.frames).all().item<bool>());
    CHECK((a.frames >= std::log(cfg.log_floor) - 1e-12).all().item<bool>());
  }
  SUBCASE("errors") {
    CHECK(code_of([&] { mel_spectrogram(silence(0.01), cfg); }) == ErrorCode::kInvalidArgument);
    CHECK(code_of([&] { mel_spectrogram(sine(100.0, 0.5, 16000), cfg); }) == ErrorCode::kInvalidArgument);
    MelConfig bad;
    bad.hop_length = 2048;
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::kInvalidArgument);
    bad = MelConfig{};
    bad.f_max = 12000.0;
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("extract_f0 on synthetic sines") {
  for (double hz : {80.0, 110.0, 150.0, 220.0, 300.0, 400.0}) {
    CAPTURE(hz);
    const auto clip = sine(hz, 0.6);
    const auto track = extract_f0(clip);
    CHECK(track.num_frames() == static_cast<size_t>(mel_spectrogram(clip).num_frames()));
    size_t voiced = 0;
    for (size_t t = 0; t < track.f0.size(); ++t) {
      if (track.f0[t] > 0.0) {
        ++voiced;
        CHECK(std::abs(track.f0[t] - hz) / hz <= 0.02);
      }
    }
    CHECK(voiced >= track.num_frames() / 2);
  }
  const auto quiet = extract_f0(silence(0.5));
  CHECK(quiet.num_voiced() == 0);
  CHECK(std::all_of(quiet.f0.begin(), quiet.f0.end(), [](double f) { return f == 0.0; }));
}

TEST_CASE("transliteration") {
  const auto& table = builtin_devanagari_table();
  SUBCASE("common script passes through") { CHECK(transliterate("a, b", table) == "a, b"); }
  SUBCASE("single syllables") {
    CHECK(transliterate("कि", table) == "ki");
    CHECK(transliterate("क", table) == "ka");
    CHECK(transliterate("क्", table) == "k");
  }
  SUBCASE("golden demo words, injective") {
    std::set<std::string> outputs;
    for (const auto& [native, expected] : golden_pairs()) {
      CAPTURE(native);
      const auto got = transliterate(native, table);
      CHECK(got == nfc(expected));
      outputs.insert(got);
      for (char32_t c : to_code_points(got)) CHECK(is_common_script(c));
    }
    CHECK(outputs.size() == golden_pairs().size());
  }
  SUBCASE("unmapped graphemes are listed in strict mode, dropped otherwise") {
    try {
      transliterate("கா a", table);  // Tamil
      FAIL("expected unmapped-grapheme error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnmappedGrapheme);
      CHECK(std::string(e.what()).find("U+0B95") != std::string::npos);
      CHECK(std::string(e.what()).find("U+0BBE") != std::string::npos);
    }
    CHECK(transliterate("கா a", table, TransliterationMode::kPassThrough) == " a");
  }
  SUBCASE("TSV tables") {
    auto t = TransliterationTable::parse_tsv("# comment\n\nக\tka\nகா\tkā\n", "ta");
    CHECK(t.size() == 2);
    CHECK(transliterate("காக", t) == "kāka");
    CHECK(code_of([] { TransliterationTable::parse_tsv("x\tka\nx\tki\n", "xx"); }) == ErrorCode::kDuplicate);
    CHECK(code_of([] { TransliterationTable::parse_tsv("க\tக\n", "ta"); }) == ErrorCode::kFormat);
    const auto again = TransliterationTable::parse_tsv(t.to_tsv(), "ta");
    CHECK((again.mapping() == t.mapping()));
    const auto builtin_again = TransliterationTable::parse_tsv(table.to_tsv(), "hi");
    CHECK((builtin_again.mapping() == table.mapping()));
  }
}

TEST_CASE("modulate_tempo") {
  SUBCASE("factor 1 keeps the length") {
    const auto clip = sine(200.0, 1.0);
    CHECK(modulate_tempo(clip, 1.0).samples.size() == clip.samples.size());
  }
  SUBCASE("0.77 stretches 10 s to about 12.99 s") {
    const auto out = modulate_tempo(testing::vowel_sweep(10.0), 0.77);
    CHECK(std::abs(out.duration() - 10.0 / 0.77) <= 0.01 * 10.0 / 0.77);
  }
  SUBCASE("pitch is preserved") {
    const auto out = modulate_tempo(sine(220.0, 1.0), 0.77);
    const auto track = extract_f0(out);
    size_t voiced = 0;
    for (double f : track.f0) {
      if (f > 0.0) {
        ++voiced;
        CHECK(std::abs(f - 220.0) / 220.0 <= 0.02);
      }
    }
    CHECK(voiced > track.f0.size() / 2);
  }
  SUBCASE("invalid factors") {
    CHECK(code_of([] { modulate_tempo(sine(200.0, 0.2), 0.0); }) == ErrorCode::kInvalidArgument);
    CHECK(code_of([] { modulate_tempo(sine(200.0, 0.2), -1.0); }) == ErrorCode::kInvalidArgument);
    CHECK(code_of([] { modulate_tempo(sine(200.0, 0.2), 2.5); }) == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("wav round trip") {
  testing::TempDir dir;
  const auto clip = sine(330.0, 0.2, 16000);
  write_wav(dir / "a.wav", clip);
  const auto back = read_wav(dir / "a.wav");
  CHECK(back.sample_rate == 16000);
  REQUIRE(back.samples.size() == clip.samples.size());
  for (size_t i = 0; i < clip.samples.size(); ++i) CHECK(std::abs(back.samples[i] - clip.samples[i]) <= 1.0 / 32767);
  CHECK(decode_wav(encode_wav(clip)).samples == back.samples);
  CHECK(code_of([] { decode_wav("not a wav file at all"); }) == ErrorCode::kFormat);
  CHECK(code_of([&] { read_wav(dir / "missing.wav"); }) == ErrorCode::kIo);
}

TEST_CASE("manifest") {
  const std::string text =
      R"({"id":"a","audio_path":"wavs/a.wav","text":"x; y","speaker_id":"s1","language":"hi","duration":1.5})"
      "\n"
      R"({"id":"b","audio_path":"/abs/b.wav","text":"z","speaker_id":"s2","language":"te","duration":2})"
      "\n";
  std::istringstream in(text);
  const auto m = read_manifest(in, "/data");
  REQUIRE(m.size() == 2);
  CHECK(m.utterances[0].audio_path == std::filesystem::path("/data/wavs/a.wav"));
  CHECK(m.utterances[0].normalized_text == "x, y");
  CHECK(m.utterances[1].audio_path == std::filesystem::path("/abs/b.wav"));

  std::ostringstream out;
  write_manifest(out, m, true);
  std::istringstream again(out.str());
  const auto m2 = read_manifest(again);
  REQUIRE(m2.size() == 2);
  CHECK(m2.utterances[1].raw_text == "z");
  CHECK(m2.utterances[0].duration == 1.5);

  std::istringstream dup(R"({"id":"a","audio_path":"a","text":"t","speaker_id":"s","language":"hi","duration":1})"
                         "\n"
                         R"({"id":"a","audio_path":"b","text":"t","speaker_id":"s","language":"hi","duration":1})");
  CHECK(code_of([&] { read_manifest(dup); }) == ErrorCode::kDuplicate);
  std::istringstream zero(R"({"id":"a","audio_path":"a","text":"t","speaker_id":"s","language":"hi","duration":0})");
  CHECK(code_of([&] { read_manifest(zero); }) == ErrorCode::kValidation);
  std::istringstream missing(R"({"id":"a","text":"t"})");
  CHECK(code_of([&] { read_manifest(missing); }) == ErrorCode::kFormat);
}

TEST_CASE("text frontend and feature extraction") {
  TextFrontend fe;
  fe.set_table("hi", builtin_devanagari_table());
  CHECK(fe.process("नमस्ते;  (दुनिया)", "hi") == "namastē, duniyā");
  CHECK(fe.process("plain: text", "en") == "plain, text");
  CHECK(code_of([&] { fe.process("नमस्ते", "en"); }) == ErrorCode::kUnmappedGrapheme);

  const auto f = compute_features(sine(200.0, 0.5, 44100));
  CHECK(f.audio.sample_rate == 22050);
  CHECK(static_cast<int64_t>(f.pitch.f0.size()) == f.mel.num_frames());
}
