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

#include <cmath>
#include <random>

#include "itts/acoustic/config.hpp"
#include "itts/acoustic/losses.hpp"
#include "itts/acoustic/model.hpp"
#include "itts/acoustic/vocabulary.hpp"
#include "itts/align/alignment.hpp"
#include "itts/error.hpp"

using namespace itts;
using namespace itts::acoustic;

namespace {

AcousticConfig toy_no_dropout(int64_t vocab) {
  auto cfg = AcousticConfig::toy(vocab);
  cfg.encoder.dropout = cfg.decoder.dropout = 0.0;
  cfg.duration_predictor.dropout = cfg.pitch_predictor.dropout = 0.0;
  return cfg;
}

// Same composition the trainer uses, rebuilt from the public pieces.
torch::Tensor acoustic_objective(FastPitch& model, const std::vector<int64_t>& tokens,
                                 const TrainingTargets& targets, const LossWeights& w,
                                 FeatureExtractor& extractor) {
  auto out = model->forward_train(tokens, {}, targets, true);
  LossTerms t;
  t.spec = spec_loss(targets.mel, out.mel_hat);
  std::tie(t.pitch, t.dur) =
      prosody_losses(out.prosody.pitch, out.pitch_target, out.prosody.log_duration, out.durations);
  t.align = align::forward_sum_loss(*out.soft);
  t.binary = align::binarization_loss(*out.hard, *out.soft);
  t.ssim = ssim_loss(targets.mel, out.mel_hat);
  t.asr = asr_consistency_loss(targets.mel, out.mel_hat, extractor);
  return total_loss(t, w);
}

}  // namespace

TEST_CASE("loss weights") {
  const LossWeights w;
  CHECK(w.align == 1.0);
  CHECK(w.dur == 0.1);
  CHECK(w.pitch == 0.1);
  CHECK(w.binary == 0.1);
  CHECK(w.ssim == 0.0);
  CHECK(w.asr == 0.0);
  const auto s = LossWeights::supplementary();
  CHECK(s.ssim == 1.0);
  CHECK(s.asr == 0.5);
  LossWeights bad;
  bad.dur = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("total loss is the weighted sum of its parts") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const auto w = LossWeights::supplementary();
  for (int rep = 0; rep < 1000; ++rep) {
    LossBreakdown p;
    p.spec = u(rng);
    p.align = u(rng);
    p.dur = u(rng);
    p.pitch = u(rng);
    p.binary = u(rng);
    p.ssim = u(rng);
    p.asr = u(rng);
    const double expected =
        p.spec + 1.0 * p.align + 0.1 * p.dur + 0.1 * p.pitch + 0.1 * p.binary + 1.0 * p.ssim + 0.5 * p.asr;
    CHECK(std::abs(total_loss(p, w).acoustic - expected) <= 1e-9);

    LossTerms t{torch::tensor(p.spec, torch::kFloat64),   torch::tensor(p.align, torch::kFloat64),
                torch::tensor(p.dur, torch::kFloat64),    torch::tensor(p.pitch, torch::kFloat64),
                torch::tensor(p.binary, torch::kFloat64), torch::tensor(p.ssim, torch::kFloat64),
                torch::tensor(p.asr, torch::kFloat64)};
    CHECK(std::abs(total_loss(t, w).item<double>() - expected) <= 1e-9);
    CHECK(std::abs(breakdown_of(t, w).acoustic - expected) <= 1e-9);
  }
  LossBreakdown nan_parts;
  nan_parts.dur = std::nan("");
  try {
    total_loss(nan_parts, LossWeights{});
    FAIL("expected non-finite error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonFinite);
  }
  LossTerms only_spec;
  only_spec.spec = torch::tensor(2.5, torch::kFloat64);
  CHECK(total_loss(only_spec, LossWeights{}).item<double>() == 2.5);
}

TEST_CASE("spectral and prosody losses") {
  torch::manual_seed(2);
  const auto m = torch::randn({7, 5}, torch::kFloat64);
  const auto mh = torch::randn({7, 5}, torch::kFloat64);
  double manual = 0.0;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 5; ++j) manual += std::pow(m[i][j].item<double>() - mh[i][j].item<double>(), 2);
  CHECK(spec_loss(m, mh).item<double>() == doctest::Approx(manual / 35.0).epsilon(1e-12));
  CHECK_THROWS_AS(spec_loss(m, mh.narrow(0, 0, 6)), Error);

  const auto pitch_hat = torch::tensor({1.0, 2.0, 3.0}, torch::kFloat64);
  const auto pitch_tgt = torch::tensor({1.0, 0.0, 3.0}, torch::kFloat64);
  const auto logd = torch::tensor({0.0, std::log(2.0), 1.0}, torch::kFloat64);
  align::DurationVector d{{0, 2, 3}};
  auto [lp, ld] = prosody_losses(pitch_hat, pitch_tgt, logd, d);
  CHECK(lp.item<double>() == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  const double e3 = 1.0 - std::log(3.0);
  CHECK(ld.item<double>() == doctest::Approx(e3 * e3 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(prosody_losses(pitch_hat, pitch_tgt, logd, align::DurationVector{{1, 2}}), Error);
}

TEST_CASE("SSIM properties") {
  torch::manual_seed(5);
  const auto a = torch::randn({20, 16}, torch::kFloat64);
  const auto b = torch::randn({20, 16}, torch::kFloat64);
  CHECK(ssim(a, a).item<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ssim_loss(a, a).item<double>() == doctest::Approx(0.0).epsilon(1e-12));
  const double l = ssim_loss(a, b).item<double>();
  CHECK(l > 0.0);
  CHECK(l <= 2.0);
  CHECK(ssim(a, b).item<double>() == doctest::Approx(ssim(b, a).item<double>()).epsilon(1e-12));
}

TEST_CASE("length regulation partitions the output into token runs") {
  std::mt19937_64 rng(4);
  torch::manual_seed(4);
  for (int rep = 0; rep < 100; ++rep) {
    const int64_t n = 1 + static_cast<int64_t>(rng() % 10);
    const auto h = torch::randn({n, 6}, torch::kFloat64);
    align::DurationVector d;
    for (int64_t i = 0; i < n; ++i) d.frames.push_back(static_cast<int64_t>(rng() % 5));
    if (d.total() == 0) d.frames[0] = 1;
    const auto out = length_regulate(h, d);
    REQUIRE(out.size(0) == d.total());
    int64_t row = 0;
    for (int64_t i = 0; i < n; ++i) {
      for (int64_t k = 0; k < d.frames[static_cast<size_t>(i)]; ++k, ++row) CHECK(torch::equal(out[row], h[i]));
    }
  }
  const auto h = torch::ones({2, 3}, torch::kFloat64);
  CHECK_THROWS_AS(length_regulate(h, align::DurationVector{{0, 0}}), Error);
  CHECK_THROWS_AS(length_regulate(h, align::DurationVector{{1, 1, 1}}), Error);
}

TEST_CASE("token pitch and inference durations") {
  const std::vector<double> f0{100, 0, 200, 0, 0, 300};
  const auto tp = token_pitch(f0, align::DurationVector{{2, 1, 2, 1}});
  CHECK(tp == std::vector<double>{100, 200, 0, 300});
  CHECK_THROWS_AS(token_pitch(f0, align::DurationVector{{2, 2}}), Error);

  const auto logd = torch::tensor({std::log(3.0), -5.0, std::log(10.0)}, torch::kFloat64);
  CHECK(inference_durations(logd).frames == std::vector<int64_t>{3, 1, 10});
  CHECK(inference_durations(logd, 2.0).frames == std::vector<int64_t>{2, 1, 5});
}

TEST_CASE("vocabulary") {
  const auto v = Vocabulary::from_texts({"namastē", "bha"});
  CHECK(v.size() == 8);
  const auto ids = v.encode("sabha");
  CHECK(v.decode(ids) == "sabha");
  const auto syms = v.symbols();
  CHECK(std::is_sorted(syms.begin(), syms.end()));
  try {
    v.encode("xyz");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnmappedGrapheme);
  }
  CHECK(Vocabulary::from_symbols(v.symbols()).encode("sabha") == ids);
}

TEST_CASE("model forward shapes and conditioning") {
  torch::manual_seed(0);
  auto cfg = toy_no_dropout(10);
  cfg.num_speakers = 2;
  cfg.num_languages = 2;
  FastPitch model(cfg);
  model->eval();
  const std::vector<int64_t> tokens{1, 2, 3, 4};

  const auto e0 = model->encode_text(tokens, {0, 0});
  const auto e1 = model->encode_text(tokens, {1, 0});
  CHECK(torch::equal(e0.embeddings, e1.embeddings));
  CHECK_FALSE(torch::allclose(e0.h, e1.h));

  const auto out = model->infer(tokens, {0, 1});
  CHECK(out.mel_hat.num_frames() == out.durations.total());
  CHECK(out.mel_hat.num_mels() == 80);
  CHECK(out.durations.size() == tokens.size());

  auto code_of = [&](const std::function<void()>& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kExternal;
  };
  CHECK(code_of([&] { model->encode_text({10}, {}); }) == ErrorCode::kOutOfRange);
  CHECK(code_of([&] { model->encode_text({1}, {2, 0}); }) == ErrorCode::kOutOfRange);
  CHECK(code_of([&] { model->encode_text({}, {}); }) == ErrorCode::kInvalidArgument);

  TrainingTargets targets{torch::randn({11, 80}, torch::kFloat64), std::vector<double>(11, 150.0), std::nullopt};
  const auto tr = model->forward_train(tokens, {0, 0}, targets, true);
  CHECK(tr.mel_hat.size(0) == 11);
  CHECK(tr.durations.total() == 11);
  CHECK(tr.hard->is_valid());
  targets.fixed_durations = align::DurationVector{{2, 3, 3, 3}};
  const auto fixed = model->forward_train(tokens, {0, 0}, targets, false);
  CHECK_FALSE(fixed.soft.has_value());
  CHECK(fixed.durations.frames == targets.fixed_durations->frames);
}

TEST_CASE("end-to-end acoustic loss gradient matches central differences") {
  torch::manual_seed(8);
  auto cfg = toy_no_dropout(6);
  cfg.encoder.num_blocks = cfg.decoder.num_blocks = 1;
  cfg.encoder.model_dim = cfg.decoder.model_dim = 16;
  cfg.encoder.ffn_hidden_dim = cfg.decoder.ffn_hidden_dim = 24;
  cfg.duration_predictor.filter_size = cfg.pitch_predictor.filter_size = 8;
  cfg.attention_dim = 8;
  cfg.n_mels = 12;
  cfg.pitch_mean = 150.0;
  cfg.pitch_std = 30.0;
  FastPitch model(cfg);
  model->eval();
  ConvFeatureExtractor extractor(3);
  const auto w = LossWeights::supplementary();

  const std::vector<int64_t> tokens{0, 3, 5};
  std::vector<double> f0(9);
  for (size_t t = 0; t < f0.size(); ++t) f0[t] = t % 4 == 3 ? 0.0 : 120.0 + 10.0 * static_cast<double>(t);
  TrainingTargets targets{torch::randn({9, 12}, torch::kFloat64), f0, std::nullopt};

  model->zero_grad();
  acoustic_objective(model, tokens, targets, w, extractor).backward();

  std::mt19937_64 rng(1);
  const double eps = 1e-4;
  int checked = 0;
  for (auto& named : model->named_parameters()) {
    auto p = named.value();
    if (!p.grad().defined()) continue;
    const auto grad = p.grad().clone();
    auto flat = p.data().view(-1);
    for (int k = 0; k < 2; ++k) {
      const auto idx = static_cast<int64_t>(rng() % static_cast<uint64_t>(flat.numel()));
      const double orig = flat[idx].item<double>();
      double fd;
      {
        torch::NoGradGuard ng;
        flat[idx] = orig + eps;
        const double lp = acoustic_objective(model, tokens, targets, w, extractor).item<double>();
        flat[idx] = orig - eps;
        const double lm = acoustic_objective(model, tokens, targets, w, extractor).item<double>();
        flat[idx] = orig;
        fd = (lp - lm) / (2 * eps);
      }
      const double an = grad.view(-1)[idx].item<double>();
      CAPTURE(named.key());
      CAPTURE(an);
      CAPTURE(fd);
      CHECK(std::abs(an - fd) <= 1e-2 * std::max({std::abs(an), std::abs(fd), 1e-4}));
      ++checked;
    }
  }
  CHECK(checked >= 20);
}
