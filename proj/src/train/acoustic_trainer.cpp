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

#include "itts/train/acoustic_trainer.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>

#include "itts/checkpoint.hpp"
#include "itts/error.hpp"

namespace itts::train {

namespace {

std::string epoch_name(int64_t epoch) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "acoustic_epoch%06lld.ckpt", static_cast<long long>(epoch));
  return buf;
}

double value_or_zero(const torch::Tensor& t) { return t.defined() ? t.item<double>() : 0.0; }

torch::Tensor add_term(const torch::Tensor& acc, const torch::Tensor& t) {
  if (!t.defined()) return acc;
  return acc.defined() ? acc + t : t;
}

torch::Tensor scale_term(const torch::Tensor& t, double s) { return t.defined() ? t * s : t; }

}  // namespace

torch::Tensor default_generator_state() {
  auto gen = at::detail::getDefaultCPUGenerator();
  std::lock_guard<std::mutex> lock(gen.mutex());
  return gen.get_state();
}

void set_default_generator_state(const torch::Tensor& state) {
  auto gen = at::detail::getDefaultCPUGenerator();
  std::lock_guard<std::mutex> lock(gen.mutex());
  gen.set_state(state);
}

AcousticTrainer::AcousticTrainer(AcousticDataset data, acoustic::AcousticConfig model_cfg,
                                 acoustic::LossWeights weights, TrainConfig train_cfg,
                                 OptimizerConfig opt_cfg)
    : data_(std::move(data)),
      model_cfg_(std::move(model_cfg)),
      weights_(weights),
      train_(train_cfg),
      opt_cfg_(std::move(opt_cfg)) {
  if (data_.items.empty()) throw Error(ErrorCode::kValidation, "training set is empty");
  train_.validate();
  opt_cfg_.validate();
  weights_.validate();
  data_.configure(model_cfg_);
  model_cfg_.validate();
  if (train_.reproducible) torch::set_num_threads(1);
  torch::manual_seed(train_.seed);
  model_ = acoustic::FastPitch(model_cfg_);
  optimizer_ = make_optimizer(opt_cfg_, model_->parameters());
  if (weights_.asr != 0.0) extractor_ = std::make_shared<acoustic::ConvFeatureExtractor>();
}

void AcousticTrainer::set_feature_extractor(std::shared_ptr<acoustic::FeatureExtractor> extractor) {
  extractor_ = std::move(extractor);
}

int64_t AcousticTrainer::steps_per_epoch() const {
  const auto n = static_cast<int64_t>(data_.items.size());
  return (n + train_.batch_size - 1) / train_.batch_size;
}

void AcousticTrainer::freeze_aligner() {
  if (frozen_) return;
  for (auto& p : model_->aligner()->parameters()) {
    p.set_requires_grad(false);
    p.mutable_grad() = torch::Tensor();
  }
  // Items never visited before the cutoff get one hard alignment now.
  const bool was_training = model_->is_training();
  model_->eval();
  {
    torch::NoGradGuard no_grad;
    for (size_t i = 0; i < data_.items.size(); ++i) {
      if (durations_.count(i)) continue;
      const auto& item = data_.items[i];
      auto enc = model_->encode_text(item.tokens, item.cond);
      auto soft = model_->aligner()->forward(enc.embeddings, item.mel);
      durations_[i] = align::durations_from_hard(align::viterbi_hard(soft));
    }
  }
  model_->train(was_training);
  frozen_ = true;
}

acoustic::LossBreakdown AcousticTrainer::step() {
  if (finished()) throw Error(ErrorCode::kOutOfRange, "training already finished");
  const auto sched = aligner_schedule(epoch_, train_, weights_);
  if (!sched.active) freeze_aligner();

  acoustic::LossWeights w = weights_;
  w.align = sched.align;
  w.binary = sched.binary;

  const auto order = epoch_order(data_.items.size(), train_.seed, epoch_);
  const auto begin = static_cast<size_t>(batch_in_epoch_ * train_.batch_size);
  const auto end = std::min(order.size(), begin + static_cast<size_t>(train_.batch_size));
  std::vector<size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(begin),
                            order.begin() + static_cast<std::ptrdiff_t>(end));

  const double lr = opt_cfg_.learning_rate_at(global_step_, total_steps());
  set_learning_rate(*optimizer_, lr);
  model_->train();
  optimizer_->zero_grad(true);

  acoustic::LossTerms sum;
  std::map<size_t, align::DurationVector> visited;
  for (size_t idx : batch) {
    const auto& item = data_.items[idx];
    acoustic::TrainingTargets targets{item.mel, item.f0, std::nullopt};
    if (!sched.active) targets.fixed_durations = durations_.at(idx);
    auto out = model_->forward_train(item.tokens, item.cond, targets, sched.active);

    acoustic::LossTerms terms;
    terms.spec = acoustic::spec_loss(item.mel, out.mel_hat);
    std::tie(terms.pitch, terms.dur) = acoustic::prosody_losses(
        out.prosody.pitch, out.pitch_target, out.prosody.log_duration, out.durations);
    if (sched.active) {
      terms.align = align::forward_sum_loss(*out.soft);
      terms.binary = align::binarization_loss(*out.hard, *out.soft);
      visited[idx] = out.durations;
    }
    if (w.ssim != 0.0) terms.ssim = acoustic::ssim_loss(item.mel, out.mel_hat);
    if (w.asr != 0.0) terms.asr = acoustic::asr_consistency_loss(item.mel, out.mel_hat, *extractor_);

    sum.spec = add_term(sum.spec, terms.spec);
    sum.align = add_term(sum.align, terms.align);
    sum.dur = add_term(sum.dur, terms.dur);
    sum.pitch = add_term(sum.pitch, terms.pitch);
    sum.binary = add_term(sum.binary, terms.binary);
    sum.ssim = add_term(sum.ssim, terms.ssim);
    sum.asr = add_term(sum.asr, terms.asr);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  acoustic::LossTerms mean{scale_term(sum.spec, inv),   scale_term(sum.align, inv),
                           scale_term(sum.dur, inv),    scale_term(sum.pitch, inv),
                           scale_term(sum.binary, inv), scale_term(sum.ssim, inv),
                           scale_term(sum.asr, inv)};

  acoustic::LossBreakdown parts;
  try {
    parts = acoustic::breakdown_of(mean, w);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNonFinite) throw;
    acoustic::LossBreakdown raw{value_or_zero(mean.spec),   value_or_zero(mean.align),
                                value_or_zero(mean.dur),    value_or_zero(mean.pitch),
                                value_or_zero(mean.binary), value_or_zero(mean.ssim),
                                value_or_zero(mean.asr),    0.0};
    write_snapshot(raw, batch, lr);
    throw Error(ErrorCode::kNonFinite, std::string(e.what()) + " at step " +
                                           std::to_string(global_step_) + " (epoch " +
                                           std::to_string(epoch_) + ")");
  }

  auto total = acoustic::total_loss(mean, w);
  total.backward();
  if (train_.grad_clip_norm > 0.0) {
    std::vector<torch::Tensor> with_grad;
    for (auto& p : model_->parameters()) {
      if (p.grad().defined()) with_grad.push_back(p);
    }
    torch::nn::utils::clip_grad_norm_(with_grad, train_.grad_clip_norm);
  }
  optimizer_->step();
  for (auto& [idx, d] : visited) durations_[idx] = std::move(d);

  const std::pair<const char*, double> logged[] = {
      {"spec", parts.spec},       {"align", parts.align},   {"dur", parts.dur},
      {"pitch", parts.pitch},     {"binary", parts.binary}, {"ssim", parts.ssim},
      {"asr", parts.asr},         {"acoustic", parts.acoustic},
      {"lambda_align", w.align},  {"lambda_binary", w.binary}, {"learning_rate", lr}};
  for (const auto& [term, value] : logged) curve_.add(global_step_, term, value);

  ++global_step_;
  if (++batch_in_epoch_ >= steps_per_epoch()) {
    batch_in_epoch_ = 0;
    ++epoch_;
    if (!output_dir_.empty() && train_.checkpoint_interval > 0 &&
        epoch_ % train_.checkpoint_interval == 0 && !finished()) {
      save_checkpoint(output_dir_ / epoch_name(epoch_));
    }
  }
  return parts;
}

void AcousticTrainer::run(int64_t max_steps) {
  int64_t done = 0;
  while (!finished() && (max_steps < 0 || done < max_steps)) {
    step();
    ++done;
  }
  if (!output_dir_.empty()) {
    std::filesystem::create_directories(output_dir_);
    curve_.write_csv(output_dir_ / "loss_acoustic.csv");
    save_checkpoint(output_dir_ / (finished() ? "acoustic_final.ckpt" : "acoustic_last.ckpt"));
  }
}

nlohmann::json AcousticTrainer::meta() const {
  nlohmann::json tables = nlohmann::json::object();
  for (const auto& [lang, table] : data_.frontend.tables()) tables[lang] = table.to_tsv();
  nlohmann::json durations = nlohmann::json::object();
  for (const auto& [idx, d] : durations_) durations[data_.items[idx].id] = d.frames;
  return {{"model", model_cfg_},
          {"loss_weights", weights_},
          {"train", train_},
          {"optimizer", opt_cfg_},
          {"mel", data_.mel_config},
          {"vocabulary", data_.vocabulary.symbols()},
          {"conditioning", data_.conditioning},
          {"tables", tables},
          {"epoch", epoch_},
          {"batch_in_epoch", batch_in_epoch_},
          {"step", global_step_},
          {"aligner_frozen", frozen_},
          {"frozen_durations", durations}};
}

void AcousticTrainer::save_checkpoint(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  CheckpointWriter writer("acoustic", meta());
  writer.add_module("model", *model_);
  writer.add_optimizer("optimizer", *optimizer_);
  writer.add_tensor("rng_state", default_generator_state());
  writer.save(path);
}

void AcousticTrainer::load_checkpoint(const std::filesystem::path& path) {
  CheckpointReader reader(path, "acoustic");
  const auto& m = reader.meta();
  if (m.at("model").get<acoustic::AcousticConfig>().vocab_size != model_cfg_.vocab_size ||
      m.at("vocabulary").get<std::vector<std::string>>() != data_.vocabulary.symbols()) {
    throw Error(ErrorCode::kValidation, "checkpoint vocabulary differs from the training set");
  }
  reader.load_module("model", *model_);
  epoch_ = m.at("epoch").get<int64_t>();
  batch_in_epoch_ = m.at("batch_in_epoch").get<int64_t>();
  global_step_ = m.at("step").get<int64_t>();

  std::map<std::string, size_t> index;
  for (size_t i = 0; i < data_.items.size(); ++i) index[data_.items[i].id] = i;
  durations_.clear();
  for (const auto& [id, frames] : m.at("frozen_durations").items()) {
    auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorCode::kValidation, "checkpoint names unknown item '" + id + "'");
    durations_[it->second] = align::DurationVector{frames.get<std::vector<int64_t>>()};
  }
  frozen_ = false;
  for (auto& p : model_->aligner()->parameters()) p.set_requires_grad(true);
  if (m.at("aligner_frozen").get<bool>()) freeze_aligner();

  reader.load_optimizer("optimizer", *optimizer_);
  set_default_generator_state(reader.tensor("rng_state"));
}

void AcousticTrainer::write_snapshot(const acoustic::LossBreakdown& parts, const std::vector<size_t>& batch,
                                     double lr) {
  if (output_dir_.empty()) return;
  std::filesystem::create_directories(output_dir_);
  nlohmann::json ids = nlohmann::json::array();
  for (size_t i : batch) ids.push_back(data_.items[i].id);
  auto finite_or_text = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  };
  nlohmann::json snap{{"step", global_step_},
                      {"epoch", epoch_},
                      {"learning_rate", lr},
                      {"items", ids},
                      {"losses",
                       {{"spec", finite_or_text(parts.spec)},
                        {"align", finite_or_text(parts.align)},
                        {"dur", finite_or_text(parts.dur)},
                        {"pitch", finite_or_text(parts.pitch)},
                        {"binary", finite_or_text(parts.binary)},
                        {"ssim", finite_or_text(parts.ssim)},
                        {"asr", finite_or_text(parts.asr)}}}};
  const auto stem = "nonfinite_step" + std::to_string(global_step_);
  std::ofstream(output_dir_ / (stem + ".json")) << snap.dump(2) << '\n';
  save_checkpoint(output_dir_ / (stem + ".ckpt"));
}

AcousticBundle load_acoustic_checkpoint(const std::filesystem::path& path) {
  CheckpointReader reader(path, "acoustic");
  const auto& m = reader.meta();
  AcousticBundle b;
  b.vocabulary = acoustic::Vocabulary::from_symbols(m.at("vocabulary").get<std::vector<std::string>>());
  b.conditioning = m.at("conditioning").get<ConditioningMaps>();
  b.mel_config = m.at("mel").get<corpus::MelConfig>();
  for (const auto& [lang, tsv] : m.at("tables").items()) {
    b.frontend.set_table(lang, corpus::TransliterationTable::parse_tsv(tsv.get<std::string>(), lang));
  }
  b.model = acoustic::FastPitch(m.at("model").get<acoustic::AcousticConfig>());
  reader.load_module("model", *b.model);
  b.model->eval();
  return b;
}

}  // namespace itts::train
