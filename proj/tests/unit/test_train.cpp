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
#include <set>
#include <sstream>

#include "itts/checkpoint.hpp"
#include "itts/error.hpp"
#include "itts/train/acoustic_trainer.hpp"
#include "itts/train/config.hpp"
#include "itts/train/loss_curve.hpp"
#include "itts/train/synthesize.hpp"
#include "itts/train/vocoder_trainer.hpp"
#include "toy_corpus.hpp"

using namespace itts;
using namespace itts::train;

namespace {

const std::vector<std::string> kTexts{"namastē", "pānī", "ghara"};

TrainConfig small_train(int64_t epochs) {
  TrainConfig t;
  t.total_epochs = epochs;
  t.batch_size = 2;
  t.checkpoint_interval = 0;
  t.seed = 77;
  return t;
}

OptimizerConfig fast_opt() {
  auto o = OptimizerConfig::acoustic_default();
  o.learning_rate = 1e-3;
  return o;
}

bool same_parameters(torch::nn::Module& a, torch::nn::Module& b) {
  const auto pa = a.named_parameters();
  const auto pb = b.named_parameters();
  if (pa.size() != pb.size()) return false;
  for (const auto& item : pa) {
    if (!torch::equal(item.value(), pb[item.key()])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("aligner schedule switches off at round(fraction * epochs)") {
  TrainConfig cfg;
  cfg.total_epochs = 2500;
  cfg.aligner_off_fraction = 0.6;
  CHECK(cfg.aligner_cutoff_epoch() == 1500);
  const acoustic::LossWeights w;
  for (int64_t e : {0, 1, 700, 1498, 1499}) {
    const auto s = aligner_schedule(e, cfg, w);
    CHECK(s.active);
    CHECK(s.align == 1.0);
    CHECK(s.binary == 0.1);
  }
  for (int64_t e : {1500, 1501, 2000, 2499}) {
    const auto s = aligner_schedule(e, cfg, w);
    CHECK_FALSE(s.active);
    CHECK(s.align == 0.0);
    CHECK(s.binary == 0.0);
  }
  // The weighted total always equals spec + dur + pitch terms plus the
  // scheduled aligner terms.
  acoustic::LossBreakdown parts{1.0, 2.0, 3.0, 4.0, 5.0, 0.0, 0.0, 0.0};
  for (int64_t e = 1490; e < 1510; ++e) {
    const auto s = aligner_schedule(e, cfg, w);
    acoustic::LossWeights ew = w;
    ew.align = s.align;
    ew.binary = s.binary;
    const double expected = 1.0 + 0.1 * 3.0 + 0.1 * 4.0 + (e < 1500 ? 2.0 + 0.5 : 0.0);
    CHECK(acoustic::total_loss(parts, ew).acoustic == doctest::Approx(expected).epsilon(1e-15));
  }
  cfg.total_epochs = 5;
  CHECK(cfg.aligner_cutoff_epoch() == 3);
  cfg.aligner_off_fraction = 0.5;
  CHECK(cfg.aligner_cutoff_epoch() == 3);  // 2.5 rounds half away from zero
}

TEST_CASE("learning rate schedule") {
  auto o = OptimizerConfig::acoustic_default();
  CHECK(o.beta1 == 0.99);
  CHECK(o.beta2 == 0.998);
  CHECK(o.weight_decay == 1e-6);
  CHECK(o.learning_rate_at(0, 1000) == doctest::Approx(1e-5));
  CHECK(o.learning_rate_at(9, 1000) == doctest::Approx(1e-4));
  CHECK(o.learning_rate_at(500, 1000) == doctest::Approx(1e-4));
  CHECK(o.learning_rate_at(0, 10) == doctest::Approx(1e-4));
  const auto v = OptimizerConfig::vocoder_default();
  CHECK(v.algorithm == "adamw");
  CHECK(v.learning_rate_at(0, 10) == 2e-4);
  o.algorithm = "sgd";
  CHECK_THROWS_AS(o.validate(), Error);
}

TEST_CASE("epoch order is a deterministic permutation") {
  for (size_t n : {1u, 2u, 7u, 50u}) {
    const auto a = epoch_order(n, 5, 3);
    CHECK(a == epoch_order(n, 5, 3));
    std::set<size_t> s(a.begin(), a.end());
    CHECK(s.size() == n);
    CHECK(*s.rbegin() == n - 1);
  }
  CHECK(epoch_order(50, 5, 3) != epoch_order(50, 5, 4));
  CHECK(epoch_order(50, 5, 3) != epoch_order(50, 6, 3));
}

TEST_CASE("loss curve CSV round trip") {
  LossCurve c;
  c.add(0, "spec", 1.0 / 3.0);
  c.add(0, "align", 2.5);
  c.add(1, "spec", 0.1);
  std::stringstream ss;
  c.write_csv(ss);
  CHECK(ss.str().rfind("step,term,value\n", 0) == 0);
  const auto back = LossCurve::read_csv(ss);
  CHECK(back.series("spec") == std::vector<double>{1.0 / 3.0, 0.1});
  CHECK(back.steps("spec") == std::vector<int64_t>{0, 1});
  CHECK(back.terms() == std::vector<std::string>{"spec", "align"});
  std::istringstream bad("a,b,c\n");
  CHECK_THROWS_AS(LossCurve::read_csv(bad), Error);
  std::istringstream bad_row("step,term,value\n1,spec\n");
  CHECK_THROWS_AS(LossCurve::read_csv(bad_row), Error);
}

TEST_CASE("acoustic trainer freezes the aligner after the cutoff") {
  const auto data = testing::toy_dataset(kTexts);
  AcousticTrainer trainer(data, testing::toy_acoustic_config(), {}, small_train(5), fast_opt());
  CHECK(trainer.steps_per_epoch() == 2);
  CHECK(trainer.total_steps() == 10);

  std::map<std::string, torch::Tensor> aligner_at_cutoff;
  while (!trainer.finished()) {
    if (trainer.epoch() == 3 && aligner_at_cutoff.empty()) {
      for (const auto& p : trainer.model()->aligner()->named_parameters()) {
        aligner_at_cutoff[p.key()] = p.value().detach().clone();
      }
    }
    const auto epoch = trainer.epoch();
    trainer.step();
    CHECK(trainer.aligner_frozen() == (epoch >= 3));
  }
  CHECK(trainer.aligner_frozen());
  for (const auto& p : trainer.model()->aligner()->named_parameters()) {
    CHECK_FALSE(p.value().requires_grad());
    CHECK(torch::equal(p.value(), aligner_at_cutoff.at(p.key())));
  }
  const auto la = trainer.curve().series("lambda_align");
  const auto lb = trainer.curve().series("lambda_binary");
  const auto al = trainer.curve().series("align");
  REQUIRE(la.size() == 10);
  for (size_t s = 0; s < 10; ++s) {
    CHECK(la[s] == (s < 6 ? 1.0 : 0.0));
    CHECK(lb[s] == (s < 6 ? 0.1 : 0.0));
    if (s >= 6) CHECK(al[s] == 0.0);
  }
  CHECK(trainer.frozen_durations().size() == data.size());
  for (const auto& [idx, d] : trainer.frozen_durations()) {
    CHECK(d.total() == data.items[idx].mel.size(0));
    CHECK(d.size() == data.items[idx].tokens.size());
  }
  CHECK_THROWS_AS(trainer.step(), Error);
}

TEST_CASE("acoustic training resumes bit-exactly from a checkpoint") {
  testing::TempDir dir;
  const auto data = testing::toy_dataset(kTexts);
  const auto cfg = testing::toy_acoustic_config();

  AcousticTrainer straight(data, cfg, {}, small_train(5), fast_opt());
  straight.run();

  AcousticTrainer first(data, cfg, {}, small_train(5), fast_opt());
  first.run(7);  // crosses the aligner cutoff at step 6
  first.save_checkpoint(dir / "mid.ckpt");
  torch::manual_seed(999);  // resuming must not depend on ambient RNG state

  AcousticTrainer resumed(data, cfg, {}, small_train(5), fast_opt());
  resumed.load_checkpoint(dir / "mid.ckpt");
  CHECK(resumed.global_step() == 7);
  CHECK(resumed.aligner_frozen());
  resumed.run();

  CHECK(same_parameters(*straight.model(), *resumed.model()));
  const auto a = straight.curve().series("acoustic");
  const auto b = resumed.curve().series("acoustic");
  REQUIRE(b.size() == 3);
  for (size_t i = 0; i < 3; ++i) CHECK(a[7 + i] == b[i]);
}

TEST_CASE("acoustic checkpoint bundle and synthesis") {
  testing::TempDir dir;
  const auto data = testing::toy_dataset(kTexts, 0.5, true);
  AcousticTrainer trainer(data, testing::toy_acoustic_config(), {}, small_train(1), fast_opt());
  trainer.set_output_dir(dir.path());
  trainer.run();
  REQUIRE(std::filesystem::exists(dir / "acoustic_final.ckpt"));
  REQUIRE(std::filesystem::exists(dir / "loss_acoustic.csv"));
  CHECK(LossCurve::read_csv(dir / "loss_acoustic.csv").terms() == acoustic_curve_terms());

  auto bundle = load_acoustic_checkpoint(dir / "acoustic_final.ckpt");
  CHECK(same_parameters(*bundle.model, *trainer.model()));
  CHECK(bundle.vocabulary.symbols() == data.vocabulary.symbols());
  CHECK(bundle.conditioning.speakers.size() == 2);
  CHECK_THROWS_AS(CheckpointReader(dir / "acoustic_final.ckpt", "vocoder"), Error);

  TrainConfig vt = small_train(1);
  vt.batch_size = 1;
  vt.segment_size = 2048;
  std::vector<corpus::AudioClip> clips{testing::vowel_sweep(0.3)};
  VocoderTrainer voc(clips, vocoder::GeneratorConfig::toy(), vocoder::DiscriminatorConfig::toy(), {}, vt,
                     OptimizerConfig::vocoder_default());
  voc.save_checkpoint(dir / "voc.ckpt");

  auto synth = Synthesizer::load(dir / "acoustic_final.ckpt", dir / "voc.ckpt");
  SynthesisRequest req{"pānī", "s1", "", 1.0};
  const auto a = synth.synthesize(req);
  const auto b = synth.synthesize(req);
  CHECK(a.samples == b.samples);
  CHECK(a.sample_rate == 22050);
  CHECK(a.samples.size() == 256 * static_cast<size_t>(synth.synthesize_mel(req).num_frames()));
  auto code_of = [&](SynthesisRequest r) {
    try {
      synth.synthesize(r);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kExternal;
  };
  CHECK(code_of({"", "s1", "", 1.0}) == ErrorCode::kInvalidArgument);
  CHECK(code_of({"pānī", "nobody", "", 1.0}) == ErrorCode::kNotFound);
  CHECK(code_of({"xyz", "s1", "", 1.0}) == ErrorCode::kUnmappedGrapheme);
}

TEST_CASE("vocoder trainer alternates D and G steps and resumes exactly") {
  testing::TempDir dir;
  TrainConfig vt = small_train(4);
  vt.batch_size = 1;
  vt.segment_size = 2048;
  std::vector<corpus::AudioClip> clips{testing::vowel_sweep(0.3), testing::vowel_sweep(0.2, 150, 200)};
  auto make = [&] {
    return VocoderTrainer(clips, vocoder::GeneratorConfig::toy(), vocoder::DiscriminatorConfig::toy(), {}, vt,
                          OptimizerConfig::vocoder_default());
  };
  auto straight = make();
  straight.run();
  CHECK(straight.generator_steps() == 8);
  CHECK(straight.discriminator_steps() == 8);
  for (const char* term : {"discriminator", "adversarial", "feature_matching", "mel", "generator"}) {
    CHECK(straight.curve().series(term).size() == 8);
  }
  CHECK(std::isfinite(straight.evaluate_mel_l1()));

  auto first = make();
  first.run(3);
  first.save_checkpoint(dir / "v.ckpt");
  torch::manual_seed(5);
  auto resumed = make();
  resumed.load_checkpoint(dir / "v.ckpt");
  resumed.run();
  CHECK(same_parameters(*straight.generator(), *resumed.generator()));
  CHECK(same_parameters(*straight.discriminator(), *resumed.discriminator()));

  auto bundle = load_vocoder_checkpoint(dir / "v.ckpt");
  CHECK(same_parameters(*bundle.generator, *first.generator()));
}

TEST_CASE("dataset helpers") {
  const auto data = testing::toy_dataset(kTexts);
  CHECK(data.pitch_mean > 100.0);
  CHECK(data.pitch_std > 0.0);
  acoustic::AcousticConfig cfg;
  data.configure(cfg);
  CHECK(cfg.vocab_size == data.vocabulary.size());
  CHECK(cfg.pitch_mean == data.pitch_mean);

  ConditioningMaps maps;
  CHECK_FALSE(maps.lookup("x", "y").speaker_id.has_value());
  maps.speakers = {{"a", 0}};
  CHECK(maps.lookup("a", "").speaker_id == 0);
  CHECK_THROWS_AS(maps.lookup("b", ""), Error);

  try {
    make_acoustic_item("x", "namastēnamastē", torch::zeros({5, 80}, torch::kFloat64),
                       std::vector<double>(5, 0.0), data.vocabulary, {});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasibleAlignment);
  }
  CHECK_THROWS_AS(make_acoustic_item("x", "pānī", torch::zeros({9, 80}, torch::kFloat64),
                                     std::vector<double>(8, 0.0), data.vocabulary, {}),
                  Error);

  testing::TempDir dir;
  const auto cache = feature_cache_of(data);
  cache.save(dir / "f.ckpt");
  const auto back = FeatureCache::load(dir / "f.ckpt");
  CHECK(back.features.size() == 3);
  CHECK(torch::equal(back.features.at("utt1").first, data.items[1].mel));
  CHECK(back.features.at("utt1").second == data.items[1].f0);
}
