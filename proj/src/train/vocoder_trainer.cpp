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

#include "itts/train/vocoder_trainer.hpp"

#include <cmath>
#include <cstdio>

#include "itts/checkpoint.hpp"
#include "itts/error.hpp"
#include "itts/train/acoustic_trainer.hpp"

namespace itts::train {

namespace {

uint64_t mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void clip_gradients(torch::nn::Module& module, double max_norm) {
  if (max_norm <= 0.0) return;
  std::vector<torch::Tensor> with_grad;
  for (auto& p : module.parameters()) {
    if (p.grad().defined()) with_grad.push_back(p);
  }
  torch::nn::utils::clip_grad_norm_(with_grad, max_norm);
}

}  // namespace

torch::Tensor crop_segment(const corpus::AudioClip& clip, int64_t offset, int64_t segment) {
  auto out = torch::zeros({segment}, torch::kFloat64);
  const auto n = static_cast<int64_t>(clip.samples.size());
  auto acc = out.accessor<double, 1>();
  for (int64_t i = 0; i < segment && offset + i < n; ++i) acc[i] = clip.samples[offset + i];
  return out;
}

torch::Tensor segment_mel(const torch::Tensor& segments, const corpus::MelConfig& cfg) {
  if (segments.size(-1) % cfg.hop_length != 0) {
    throw Error(ErrorCode::kInvalidArgument, "segment length must be a multiple of the hop length");
  }
  auto mel = corpus::log_mel(segments, cfg);  // [B, T + 1, n_mels]
  return mel.slice(1, 0, mel.size(1) - 1).transpose(1, 2).contiguous();
}

VocoderTrainer::VocoderTrainer(std::vector<corpus::AudioClip> clips, vocoder::GeneratorConfig gen_cfg,
                               vocoder::DiscriminatorConfig disc_cfg, corpus::MelConfig mel_cfg,
                               TrainConfig train_cfg, OptimizerConfig opt_cfg,
                               vocoder::GeneratorLossWeights weights)
    : clips_(std::move(clips)),
      gen_cfg_(std::move(gen_cfg)),
      disc_cfg_(std::move(disc_cfg)),
      mel_cfg_(mel_cfg),
      train_(train_cfg),
      opt_cfg_(std::move(opt_cfg)),
      weights_(weights) {
  if (clips_.empty()) throw Error(ErrorCode::kValidation, "training set is empty");
  train_.validate();
  mel_cfg_.validate();
  gen_cfg_.n_mels = mel_cfg_.n_mels;
  gen_cfg_.validate(mel_cfg_.hop_length);
  if (train_.segment_size % mel_cfg_.hop_length != 0 || train_.segment_size < mel_cfg_.win_length) {
    throw Error(ErrorCode::kInvalidArgument,
                "segment_size must be a multiple of the hop and at least one window long");
  }
  for (const auto& c : clips_) {
    if (c.sample_rate != mel_cfg_.sample_rate) {
      throw Error(ErrorCode::kUnsupportedRate, "vocoder clips must be at " +
                                                    std::to_string(mel_cfg_.sample_rate) + " Hz");
    }
  }
  if (train_.reproducible) torch::set_num_threads(1);
  torch::manual_seed(train_.seed);
  generator_ = vocoder::Generator(gen_cfg_);
  discriminator_ = vocoder::MultiDiscriminator(disc_cfg_);
  opt_g_ = make_optimizer(opt_cfg_, generator_->parameters());
  opt_d_ = make_optimizer(opt_cfg_, discriminator_->parameters());
}

int64_t VocoderTrainer::steps_per_epoch() const {
  const auto n = static_cast<int64_t>(clips_.size());
  return (n + train_.batch_size - 1) / train_.batch_size;
}

VocoderStepLosses VocoderTrainer::step() {
  if (finished()) throw Error(ErrorCode::kOutOfRange, "training already finished");
  const auto order = epoch_order(clips_.size(), train_.seed, epoch_);
  const auto begin = static_cast<size_t>(batch_in_epoch_ * train_.batch_size);
  const auto end = std::min(order.size(), begin + static_cast<size_t>(train_.batch_size));

  std::vector<torch::Tensor> segments;
  for (size_t k = begin; k < end; ++k) {
    const auto& clip = clips_[order[k]];
    const auto n = static_cast<int64_t>(clip.samples.size());
    int64_t offset = 0;
    if (n > train_.segment_size) {
      const uint64_t r = mix(train_.seed ^ mix(static_cast<uint64_t>(global_step_) * 0x100000001b3ULL + k));
      offset = static_cast<int64_t>(r % static_cast<uint64_t>(n - train_.segment_size + 1));
    }
    segments.push_back(crop_segment(clip, offset, train_.segment_size));
  }
  auto real = torch::stack(segments);  // [B, N]
  auto mel = segment_mel(real, mel_cfg_);
  real = real.unsqueeze(1);

  const double lr = opt_cfg_.learning_rate_at(global_step_, steps_per_epoch() * train_.total_epochs);
  set_learning_rate(*opt_g_, lr);
  set_learning_rate(*opt_d_, lr);
  generator_->train();
  discriminator_->train();

  auto fake = generator_->forward(mel);

  opt_d_->zero_grad(true);
  auto loss_d = vocoder::vocoder_discriminator_loss(real, fake, discriminator_);
  loss_d.backward();
  clip_gradients(*discriminator_, train_.grad_clip_norm);
  opt_d_->step();
  ++discriminator_steps_;

  opt_g_->zero_grad(true);
  auto g = vocoder::vocoder_generator_loss(real, fake, discriminator_, mel_cfg_, weights_);
  g.total.backward();
  clip_gradients(*generator_, train_.grad_clip_norm);
  opt_g_->step();
  ++generator_steps_;

  VocoderStepLosses out{loss_d.item<double>(), g.adversarial.item<double>(),
                        g.feature_matching.item<double>(), g.mel.item<double>(), g.total.item<double>()};
  for (double v : {out.discriminator, out.generator}) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFinite, "vocoder loss is not finite at step " + std::to_string(global_step_));
    }
  }
  curve_.add(global_step_, "discriminator", out.discriminator);
  curve_.add(global_step_, "adversarial", out.adversarial);
  curve_.add(global_step_, "feature_matching", out.feature_matching);
  curve_.add(global_step_, "mel", out.mel);
  curve_.add(global_step_, "generator", out.generator);

  ++global_step_;
  if (++batch_in_epoch_ >= steps_per_epoch()) {
    batch_in_epoch_ = 0;
    ++epoch_;
    if (!output_dir_.empty() && train_.checkpoint_interval > 0 &&
        epoch_ % train_.checkpoint_interval == 0 && !finished()) {
      char name[64];
      std::snprintf(name, sizeof(name), "vocoder_epoch%06lld.ckpt", static_cast<long long>(epoch_));
      save_checkpoint(output_dir_ / name);
    }
  }
  return out;
}

void VocoderTrainer::run(int64_t max_steps) {
  int64_t done = 0;
  while (!finished() && (max_steps < 0 || done < max_steps)) {
    step();
    ++done;
  }
  if (!output_dir_.empty()) {
    std::filesystem::create_directories(output_dir_);
    curve_.write_csv(output_dir_ / "loss_vocoder.csv");
    save_checkpoint(output_dir_ / (finished() ? "vocoder_final.ckpt" : "vocoder_last.ckpt"));
  }
}

double VocoderTrainer::evaluate_mel_l1(size_t clip_index, int64_t segment) {
  if (clip_index >= clips_.size()) throw Error(ErrorCode::kOutOfRange, "clip index out of range");
  if (segment <= 0) segment = train_.segment_size;
  segment -= segment % mel_cfg_.hop_length;
  auto real = crop_segment(clips_[clip_index], 0, segment).unsqueeze(0);
  torch::NoGradGuard no_grad;
  const bool was_training = generator_->is_training();
  generator_->eval();
  auto fake = generator_->forward(segment_mel(real, mel_cfg_)).squeeze(1);
  generator_->train(was_training);
  return vocoder::mel_l1_loss(real, fake, mel_cfg_).item<double>();
}

void VocoderTrainer::save_checkpoint(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  nlohmann::json meta{{"generator", gen_cfg_},
                      {"discriminator", disc_cfg_},
                      {"mel", mel_cfg_},
                      {"train", train_},
                      {"optimizer", opt_cfg_},
                      {"epoch", epoch_},
                      {"batch_in_epoch", batch_in_epoch_},
                      {"step", global_step_},
                      {"generator_steps", generator_steps_},
                      {"discriminator_steps", discriminator_steps_}};
  CheckpointWriter writer("vocoder", meta);
  writer.add_module("generator", *generator_);
  writer.add_module("discriminator", *discriminator_);
  writer.add_optimizer("generator", *opt_g_);
  writer.add_optimizer("discriminator", *opt_d_);
  writer.add_tensor("rng_state", default_generator_state());
  writer.save(path);
}

void VocoderTrainer::load_checkpoint(const std::filesystem::path& path) {
  CheckpointReader reader(path, "vocoder");
  const auto& m = reader.meta();
  if (m.at("generator").get<vocoder::GeneratorConfig>() != gen_cfg_ ||
      m.at("discriminator").get<vocoder::DiscriminatorConfig>() != disc_cfg_) {
    throw Error(ErrorCode::kValidation, "checkpoint network configuration differs");
  }
  reader.load_module("generator", *generator_);
  reader.load_module("discriminator", *discriminator_);
  reader.load_optimizer("generator", *opt_g_);
  reader.load_optimizer("discriminator", *opt_d_);
  set_default_generator_state(reader.tensor("rng_state"));
  epoch_ = m.at("epoch").get<int64_t>();
  batch_in_epoch_ = m.at("batch_in_epoch").get<int64_t>();
  global_step_ = m.at("step").get<int64_t>();
  generator_steps_ = m.at("generator_steps").get<int64_t>();
  discriminator_steps_ = m.at("discriminator_steps").get<int64_t>();
}

VocoderBundle load_vocoder_checkpoint(const std::filesystem::path& path) {
  CheckpointReader reader(path, "vocoder");
  VocoderBundle b;
  b.mel_config = reader.meta().at("mel").get<corpus::MelConfig>();
  b.generator = vocoder::Generator(reader.meta().at("generator").get<vocoder::GeneratorConfig>());
  reader.load_module("generator", *b.generator);
  b.generator->eval();
  return b;
}

}  // namespace itts::train
