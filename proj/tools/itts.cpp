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

// itts: command-line entry point for data preparation, training, synthesis,
// evaluation and listening tests.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>

#include <json.hpp>

#include "itts/acoustic/config.hpp"
#include "itts/corpus/frontend.hpp"
#include "itts/corpus/manifest.hpp"
#include "itts/error.hpp"
#include "itts/eval/asr.hpp"
#include "itts/eval/report.hpp"
#include "itts/mos/server.hpp"
#include "itts/mos/store.hpp"
#include "itts/train/acoustic_trainer.hpp"
#include "itts/train/synthesize.hpp"
#include "itts/train/vocoder_trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw itts::Error(itts::ErrorCode::kIo, "cannot read config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw itts::Error(itts::ErrorCode::kFormat, "config " + path + ": " + e.what());
  }
}

template <typename T>
void override_key(json& cfg, const std::string& section, const std::string& key, const std::optional<T>& v) {
  if (!v) return;
  if (section.empty()) {
    cfg[key] = *v;
  } else {
    cfg[section][key] = *v;
  }
}

void echo_config(const fs::path& dir, const json& cfg) {
  fs::create_directories(dir);
  std::ofstream(dir / "effective_config.json") << cfg.dump(2) << '\n';
}

// "builtin" selects the bundled Devanagari table; anything else is a TSV path.
itts::corpus::TextFrontend make_frontend(const json& cfg) {
  itts::corpus::TextFrontend frontend;
  json tables = cfg.value("tables", json{{"hi", "builtin"}});
  for (const auto& [lang, source] : tables.items()) {
    const auto src = source.get<std::string>();
    frontend.set_table(lang, src == "builtin" ? itts::corpus::builtin_devanagari_table()
                                              : itts::corpus::TransliterationTable::load_tsv(src, lang));
  }
  return frontend;
}

itts::corpus::Manifest manifest_from(const std::string& data, const std::string& manifest) {
  if (!manifest.empty()) return itts::corpus::read_manifest(manifest);
  if (!data.empty()) return itts::corpus::read_manifest(fs::path(data) / "manifest.jsonl");
  throw UsageError("either --data or --manifest is required");
}

// ---------------------------------------------------------------- commands

struct PrepareArgs {
  std::string config, manifest, out;
  std::optional<double> max_duration;
};

int prepare_data(const PrepareArgs& a) {
  json cfg = load_config(a.config);
  override_key(cfg, "", "max_duration", a.max_duration);
  const double max_duration = cfg.value("max_duration", 20.0);
  const auto mel_cfg = cfg.value("mel", json::object()).get<itts::corpus::MelConfig>();
  mel_cfg.validate();
  const auto frontend = make_frontend(cfg);
  cfg["max_duration"] = max_duration;
  cfg["mel"] = mel_cfg;

  const fs::path out = a.out;
  fs::create_directories(out / "wavs");
  const auto input = itts::corpus::read_manifest(a.manifest);
  auto kept = itts::corpus::filter_utterances(input, max_duration);
  for (auto& u : kept.utterances) {
    auto clip = itts::corpus::read_wav(u.audio_path);
    if (clip.sample_rate != mel_cfg.sample_rate) clip = itts::corpus::resample(clip, mel_cfg.sample_rate);
    const auto wav = out / "wavs" / (u.id + ".wav");
    itts::corpus::write_wav(wav, clip);
    u.audio_path = fs::absolute(wav);
    u.duration = clip.duration();
    u.normalized_text = frontend.process(u.raw_text, u.language);
  }
  kept.sample_rate = mel_cfg.sample_rate;
  const auto dataset = itts::train::build_acoustic_dataset(kept, frontend, mel_cfg);
  itts::train::feature_cache_of(dataset).save(out / "features.ckpt");
  itts::corpus::write_manifest(out / "manifest.jsonl", kept, /*include_normalized=*/true);
  echo_config(out, cfg);
  std::cout << json{{"input_utterances", input.size()},
                    {"kept_utterances", kept.size()},
                    {"dropped_utterances", input.size() - kept.size()},
                    {"vocabulary", dataset.vocabulary.symbols()},
                    {"manifest", (out / "manifest.jsonl").string()},
                    {"features", (out / "features.ckpt").string()}}
                   .dump(2)
            << '\n';
  return 0;
}

struct TrainArgs {
  std::string config, data, manifest, out, preset, resume;
  std::optional<int64_t> epochs, batch_size, checkpoint_interval, segment_size;
  std::optional<uint64_t> seed;
  std::optional<double> aligner_off_fraction, learning_rate;
  int64_t max_steps = -1;
  bool supplementary = false;
};

void apply_train_overrides(json& cfg, const TrainArgs& a) {
  override_key(cfg, "train", "total_epochs", a.epochs);
  override_key(cfg, "train", "batch_size", a.batch_size);
  override_key(cfg, "train", "checkpoint_interval", a.checkpoint_interval);
  override_key(cfg, "train", "segment_size", a.segment_size);
  override_key(cfg, "train", "seed", a.seed);
  override_key(cfg, "train", "aligner_off_fraction", a.aligner_off_fraction);
  override_key(cfg, "optimizer", "learning_rate", a.learning_rate);
  if (!a.preset.empty()) cfg["preset"] = a.preset;
}

int train_acoustic(const TrainArgs& a) {
  json cfg = load_config(a.config);
  apply_train_overrides(cfg, a);
  if (a.supplementary) cfg["loss_weights"] = itts::acoustic::LossWeights::supplementary();

  const auto train_cfg = cfg.value("train", json::object()).get<itts::train::TrainConfig>();
  json opt_json = itts::train::OptimizerConfig::acoustic_default();
  opt_json.update(cfg.value("optimizer", json::object()));
  const auto opt_cfg = opt_json.get<itts::train::OptimizerConfig>();
  const auto weights = cfg.value("loss_weights", json::object()).get<itts::acoustic::LossWeights>();
  const auto mel_cfg = cfg.value("mel", json::object()).get<itts::corpus::MelConfig>();
  const auto preset = cfg.value("preset", std::string("paper"));
  if (preset != "paper" && preset != "toy") throw UsageError("--preset must be 'paper' or 'toy'");
  train_cfg.validate();
  opt_cfg.validate();
  weights.validate();
  mel_cfg.validate();

  const auto manifest = manifest_from(a.data, a.manifest);
  std::optional<itts::train::FeatureCache> cache;
  if (!a.data.empty() && fs::exists(fs::path(a.data) / "features.ckpt")) {
    cache = itts::train::FeatureCache::load(fs::path(a.data) / "features.ckpt");
  }
  auto dataset = itts::train::build_acoustic_dataset(manifest, make_frontend(cfg), mel_cfg,
                                                     cache ? &*cache : nullptr);
  auto model_cfg = preset == "toy" ? itts::acoustic::AcousticConfig::toy(dataset.vocabulary.size())
                                   : itts::acoustic::AcousticConfig::paper_default(dataset.vocabulary.size());
  if (cfg.contains("model")) {
    json m = model_cfg;
    m.update(cfg["model"]);
    model_cfg = m.get<itts::acoustic::AcousticConfig>();
  }

  cfg["train"] = train_cfg;
  cfg["optimizer"] = opt_cfg;
  cfg["loss_weights"] = weights;
  cfg["mel"] = mel_cfg;
  cfg["preset"] = preset;
  echo_config(a.out, cfg);

  itts::train::AcousticTrainer trainer(std::move(dataset), model_cfg, weights, train_cfg, opt_cfg);
  trainer.set_output_dir(a.out);
  if (!a.resume.empty()) trainer.load_checkpoint(a.resume);
  trainer.run(a.max_steps);
  const auto spec = trainer.curve().series("spec");
  std::cout << json{{"epochs", trainer.epoch()},
                    {"steps", trainer.global_step()},
                    {"finished", trainer.finished()},
                    {"final_spec_loss", spec.empty() ? json() : json(spec.back())},
                    {"output_dir", a.out}}
                   .dump(2)
            << '\n';
  return 0;
}

int train_vocoder(const TrainArgs& a) {
  json cfg = load_config(a.config);
  apply_train_overrides(cfg, a);
  json train_json = itts::train::TrainConfig{};
  train_json.update(cfg.value("train", json::object()));
  const auto train_cfg = train_json.get<itts::train::TrainConfig>();
  json opt_json = itts::train::OptimizerConfig::vocoder_default();
  opt_json.update(cfg.value("optimizer", json::object()));
  const auto opt_cfg = opt_json.get<itts::train::OptimizerConfig>();
  const auto mel_cfg = cfg.value("mel", json::object()).get<itts::corpus::MelConfig>();
  const auto preset = cfg.value("preset", std::string("v1"));
  if (preset != "v1" && preset != "toy") throw UsageError("--preset must be 'v1' or 'toy'");
  json gen = preset == "toy" ? itts::vocoder::GeneratorConfig::toy() : itts::vocoder::GeneratorConfig::v1();
  gen.update(cfg.value("generator", json::object()));
  json disc = preset == "toy" ? itts::vocoder::DiscriminatorConfig::toy() : itts::vocoder::DiscriminatorConfig::v1();
  disc.update(cfg.value("discriminator", json::object()));
  train_cfg.validate();
  opt_cfg.validate();
  mel_cfg.validate();

  cfg["train"] = train_cfg;
  cfg["optimizer"] = opt_cfg;
  cfg["mel"] = mel_cfg;
  cfg["generator"] = gen;
  cfg["discriminator"] = disc;
  cfg["preset"] = preset;
  echo_config(a.out, cfg);

  itts::train::VocoderTrainer trainer(itts::train::load_vocoder_clips(manifest_from(a.data, a.manifest), mel_cfg),
                                      gen.get<itts::vocoder::GeneratorConfig>(),
                                      disc.get<itts::vocoder::DiscriminatorConfig>(), mel_cfg, train_cfg, opt_cfg);
  trainer.set_output_dir(a.out);
  if (!a.resume.empty()) trainer.load_checkpoint(a.resume);
  trainer.run(a.max_steps);
  const auto mel = trainer.curve().series("mel");
  std::cout << json{{"epochs", trainer.epoch()},
                    {"generator_steps", trainer.generator_steps()},
                    {"discriminator_steps", trainer.discriminator_steps()},
                    {"finished", trainer.finished()},
                    {"final_mel_l1", mel.empty() ? json() : json(mel.back())},
                    {"output_dir", a.out}}
                   .dump(2)
            << '\n';
  return 0;
}

struct SynthArgs {
  std::string acoustic, vocoder, text, speaker, language, out;
  double pace = 1.0;
};

int synthesize(const SynthArgs& a) {
  auto synth = itts::train::Synthesizer::load(a.acoustic, a.vocoder);
  const auto audio = synth.synthesize({a.text, a.speaker, a.language, a.pace});
  itts::corpus::write_wav(a.out, audio);
  std::cout << json{{"output", a.out}, {"sample_rate", audio.sample_rate}, {"duration", audio.duration()}}.dump(2)
            << '\n';
  return 0;
}

struct EvalArgs {
  std::string config, acoustic, vocoder, testset, asr, system = "itts", out;
  bool fast_dtw = false;
};

int evaluate(const EvalArgs& a) {
  json cfg = load_config(a.config);
  if (!a.asr.empty()) cfg["asr"] = load_config(a.asr);
  if (a.fast_dtw) cfg["fast_dtw"] = true;
  auto synth = itts::train::Synthesizer::load(a.acoustic, a.vocoder);
  auto asr = itts::eval::make_asr_client(cfg.value("asr", json()), a.asr.empty() ? fs::path{} : fs::path(a.asr).parent_path());
  const auto testset = itts::corpus::read_manifest(a.testset);
  itts::eval::EvaluationOptions options;
  options.system = a.system;
  options.mel_config = synth.acoustic().mel_config;
  options.fast_dtw = cfg.value("fast_dtw", false);
  auto report = itts::eval::evaluate_testset(
      testset,
      [&](const itts::corpus::Utterance& u) {
        return synth.synthesize({u.normalized_text.empty() ? u.raw_text : u.normalized_text, u.speaker_id, u.language});
      },
      asr.get(), options);
  if (!a.out.empty()) {
    echo_config(a.out, cfg);
    std::ofstream(fs::path(a.out) / "metrics.json") << report.to_json().dump(2) << '\n';
    std::ofstream csv(fs::path(a.out) / "metrics.csv");
    report.write_csv(csv);
  }
  std::cout << report.to_json().dump(2) << '\n';
  return 0;
}

struct MosArgs {
  std::string db, campaign, campaign_file, csv, host = "127.0.0.1";
  int port = 8080;
};

int mos_author(const MosArgs& a) {
  const auto spec = itts::mos::read_campaign_spec(load_config(a.campaign_file),
                                                  fs::path(a.campaign_file).parent_path());
  itts::mos::MosStore store(a.db);
  store.create_campaign(spec);
  std::cout << json{{"campaign", spec.id},
                    {"samples", spec.samples.size()},
                    {"raters", spec.raters.size()},
                    {"expected_ratings", store.expected_ratings(spec.id)}}
                   .dump(2)
            << '\n';
  return 0;
}

itts::mos::MosServer* g_server = nullptr;

int mos_serve(const MosArgs& a) {
  itts::mos::MosStore store(a.db);
  itts::mos::MosServer server(store);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cerr << "serving " << a.db << " on http://" << a.host << ':' << a.port << '\n';
  const bool ok = server.listen(a.host, a.port);
  g_server = nullptr;
  if (!ok) throw itts::Error(itts::ErrorCode::kIo, "cannot listen on " + a.host + ":" + std::to_string(a.port));
  return 0;
}

int mos_report(const MosArgs& a) {
  itts::mos::MosStore store(a.db);
  const auto report = store.report(a.campaign);
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) throw itts::Error(itts::ErrorCode::kIo, "cannot write " + a.csv);
    store.export_csv(a.campaign, out);
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << report.to_json().dump(2) << '\n';
  return 0;
}

void print_error(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"itts: multilingual text-to-speech toolkit"};
  app.require_subcommand(1);

  PrepareArgs prep;
  auto* c_prep = app.add_subcommand("prepare-data", "Filter, resample and extract features from a manifest");
  c_prep->add_option("--config", prep.config, "JSON config file");
  c_prep->add_option("--manifest", prep.manifest, "Input JSON-lines manifest")->required();
  c_prep->add_option("--out", prep.out, "Output directory")->required();
  c_prep->add_option("--max-duration", prep.max_duration, "Drop utterances longer than this (seconds)");

  TrainArgs ta;
  auto* c_ta = app.add_subcommand("train-acoustic", "Train the acoustic model");
  TrainArgs tv;
  auto* c_tv = app.add_subcommand("train-vocoder", "Train the vocoder");
  for (auto [cmd, args] : {std::pair{c_ta, &ta}, std::pair{c_tv, &tv}}) {
    cmd->add_option("--config", args->config, "JSON config file");
    cmd->add_option("--data", args->data, "Directory written by prepare-data");
    cmd->add_option("--manifest", args->manifest, "JSON-lines manifest (instead of --data)");
    cmd->add_option("--out", args->out, "Output directory")->required();
    cmd->add_option("--preset", args->preset, "Model size preset");
    cmd->add_option("--resume", args->resume, "Checkpoint to resume from");
    cmd->add_option("--epochs", args->epochs);
    cmd->add_option("--batch-size", args->batch_size);
    cmd->add_option("--seed", args->seed);
    cmd->add_option("--checkpoint-interval", args->checkpoint_interval);
    cmd->add_option("--learning-rate", args->learning_rate);
    cmd->add_option("--max-steps", args->max_steps, "Stop after this many steps");
  }
  c_ta->add_option("--aligner-off-fraction", ta.aligner_off_fraction);
  c_ta->add_flag("--supplementary", ta.supplementary, "Add the SSIM and ASR-consistency terms");
  c_tv->add_option("--segment-size", tv.segment_size);

  SynthArgs sa;
  auto* c_syn = app.add_subcommand("synthesize", "Synthesize one sentence to a WAV file");
  c_syn->add_option("--acoustic", sa.acoustic, "Acoustic checkpoint")->required();
  c_syn->add_option("--vocoder", sa.vocoder, "Vocoder checkpoint")->required();
  c_syn->add_option("--text", sa.text)->required();
  c_syn->add_option("--speaker", sa.speaker);
  c_syn->add_option("--language", sa.language);
  c_syn->add_option("--pace", sa.pace);
  c_syn->add_option("--out", sa.out, "Output WAV")->required();

  EvalArgs ea;
  auto* c_eval = app.add_subcommand("evaluate", "Objective metrics on a held-out manifest");
  c_eval->add_option("--config", ea.config, "JSON config file");
  c_eval->add_option("--ckpt", ea.acoustic, "Acoustic checkpoint")->required();
  c_eval->add_option("--vocoder", ea.vocoder, "Vocoder checkpoint")->required();
  c_eval->add_option("--testset", ea.testset, "Test manifest")->required();
  c_eval->add_option("--asr", ea.asr, "ASR client config (JSON)");
  c_eval->add_option("--system", ea.system, "System name in the report");
  c_eval->add_option("--out", ea.out, "Also write metrics.json and metrics.csv here");
  c_eval->add_flag("--fast-dtw", ea.fast_dtw, "Use the multi-resolution DTW approximation");

  MosArgs ma, ms, mr;
  auto* c_author = app.add_subcommand("mos-author", "Create a listening-test campaign");
  c_author->add_option("--db", ma.db, "SQLite store")->required();
  c_author->add_option("--campaign", ma.campaign_file, "Campaign definition (JSON)")->required();
  auto* c_serve = app.add_subcommand("mos-serve", "Serve the rating API");
  c_serve->add_option("--db", ms.db, "SQLite store")->required();
  c_serve->add_option("--host", ms.host);
  c_serve->add_option("--port", ms.port);
  auto* c_report = app.add_subcommand("mos-report", "Aggregate ratings of a campaign");
  c_report->add_option("--db", mr.db, "SQLite store")->required();
  c_report->add_option("--campaign", mr.campaign, "Campaign id")->required();
  c_report->add_option("--csv", mr.csv, "Export raw ratings as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*c_prep) return prepare_data(prep);
    if (*c_ta) return train_acoustic(ta);
    if (*c_tv) return train_vocoder(tv);
    if (*c_syn) return synthesize(sa);
    if (*c_eval) return evaluate(ea);
    if (*c_author) return mos_author(ma);
    if (*c_serve) return mos_serve(ms);
    if (*c_report) return mos_report(mr);
  } catch (const UsageError& e) {
    std::cerr << app.help();
    print_error("usage", e.what());
    return 2;
  } catch (const itts::Error& e) {
    print_error(std::string(itts::error_code_name(e.code())), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 2;
}
