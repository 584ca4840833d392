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

#include <torch/torch.h>

#include <filesystem>
#include <memory>
#include <vector>

#include "itts/corpus/audio.hpp"
#include "itts/corpus/mel.hpp"
#include "itts/train/config.hpp"
#include "itts/train/loss_curve.hpp"
#include "itts/vocoder/discriminator.hpp"
#include "itts/vocoder/generator.hpp"
#include "itts/vocoder/losses.hpp"

namespace itts::train {

struct VocoderStepLosses {
  double discriminator = 0.0;
  double adversarial = 0.0;
  double feature_matching = 0.0;
  double mel = 0.0;  // unweighted mel L1
  double generator = 0.0;
};

// Crop of `segment` samples starting at `offset`, zero-padded on the right
// when the clip runs out.
torch::Tensor crop_segment(const corpus::AudioClip& clip, int64_t offset, int64_t segment);

// Log-mel input for a [B, N] batch of segments with N a multiple of the hop:
// the centered framing's trailing frame is dropped, giving [B, n_mels, N/hop].
torch::Tensor segment_mel(const torch::Tensor& segments, const corpus::MelConfig& cfg);

// GAN vocoder trainer. Each step crops one random segment per batch item
// (offsets drawn from (seed, step)), takes a discriminator step and then a
// generator step on the same generated audio.
class VocoderTrainer {
 public:
  VocoderTrainer(std::vector<corpus::AudioClip> clips, vocoder::GeneratorConfig gen_cfg,
                 vocoder::DiscriminatorConfig disc_cfg, corpus::MelConfig mel_cfg, TrainConfig train_cfg,
                 OptimizerConfig opt_cfg, vocoder::GeneratorLossWeights weights = {});

  void set_output_dir(std::filesystem::path dir) { output_dir_ = std::move(dir); }

  VocoderStepLosses step();
  void run(int64_t max_steps = -1);
  bool finished() const { return epoch_ >= train_.total_epochs; }

  int64_t epoch() const { return epoch_; }
  int64_t global_step() const { return global_step_; }
  int64_t generator_steps() const { return generator_steps_; }
  int64_t discriminator_steps() const { return discriminator_steps_; }
  int64_t steps_per_epoch() const;

  // Mean |log-mel(clip) - log-mel(G(mel(clip)))| over the first `segment`
  // samples of a clip, with the generator in eval mode and no gradients.
  double evaluate_mel_l1(size_t clip_index = 0, int64_t segment = 0);

  void save_checkpoint(const std::filesystem::path& path);
  void load_checkpoint(const std::filesystem::path& path);

  vocoder::Generator& generator() { return generator_; }
  vocoder::MultiDiscriminator& discriminator() { return discriminator_; }
  const LossCurve& curve() const { return curve_; }

 private:
  std::vector<corpus::AudioClip> clips_;
  vocoder::GeneratorConfig gen_cfg_;
  vocoder::DiscriminatorConfig disc_cfg_;
  corpus::MelConfig mel_cfg_;
  TrainConfig train_;
  OptimizerConfig opt_cfg_;
  vocoder::GeneratorLossWeights weights_;
  vocoder::Generator generator_{nullptr};
  vocoder::MultiDiscriminator discriminator_{nullptr};
  std::unique_ptr<torch::optim::Optimizer> opt_g_, opt_d_;
  std::filesystem::path output_dir_;
  LossCurve curve_;
  int64_t epoch_ = 0;
  int64_t batch_in_epoch_ = 0;
  int64_t global_step_ = 0;
  int64_t generator_steps_ = 0;
  int64_t discriminator_steps_ = 0;
};

struct VocoderBundle {
  vocoder::Generator generator{nullptr};
  corpus::MelConfig mel_config;
};

VocoderBundle load_vocoder_checkpoint(const std::filesystem::path& path);

}  // namespace itts::train
