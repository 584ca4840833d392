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
#include <map>
#include <memory>
#include <vector>

#include "itts/acoustic/losses.hpp"
#include "itts/acoustic/model.hpp"
#include "itts/train/config.hpp"
#include "itts/train/dataset.hpp"
#include "itts/train/loss_curve.hpp"

namespace itts::train {

// Terms written to the loss curve for every acoustic step.
inline const std::vector<std::string>& acoustic_curve_terms() {
  static const std::vector<std::string> terms{"spec",   "align", "dur",          "pitch",
                                              "binary", "ssim",  "asr",          "acoustic",
                                              "lambda_align", "lambda_binary", "learning_rate"};
  return terms;
}

// Mini-batch trainer for the acoustic model. Per-item losses are averaged
// over the batch. Once the aligner schedule switches off, the aligner is
// no longer evaluated, its parameters stop receiving gradients and every
// item's durations stay at the last hard alignment computed for it.
class AcousticTrainer {
 public:
  AcousticTrainer(AcousticDataset data, acoustic::AcousticConfig model_cfg,
                  acoustic::LossWeights weights, TrainConfig train_cfg, OptimizerConfig opt_cfg);

  // Checkpoints and the loss curve are written here; empty disables output.
  void set_output_dir(std::filesystem::path dir) { output_dir_ = std::move(dir); }
  // Replaces the fixed-seed convolutional extractor used by the ASR term.
  void set_feature_extractor(std::shared_ptr<acoustic::FeatureExtractor> extractor);

  // One optimizer step on the next batch. Throws Error{kNonFinite} after
  // writing a diagnostic snapshot when any loss term is not finite.
  acoustic::LossBreakdown step();
  // Steps until total_epochs are done, or at most max_steps more (< 0 = no
  // limit). Writes periodic checkpoints and a final one when finished.
  void run(int64_t max_steps = -1);
  bool finished() const { return epoch_ >= train_.total_epochs; }

  int64_t epoch() const { return epoch_; }
  int64_t global_step() const { return global_step_; }
  int64_t steps_per_epoch() const;
  int64_t total_steps() const { return steps_per_epoch() * train_.total_epochs; }
  bool aligner_frozen() const { return frozen_; }

  void save_checkpoint(const std::filesystem::path& path);
  // Restores model, optimizer, RNG state, frozen durations and counters
  // from a checkpoint written by an identically configured trainer.
  void load_checkpoint(const std::filesystem::path& path);

  acoustic::FastPitch& model() { return model_; }
  const AcousticDataset& dataset() const { return data_; }
  const LossCurve& curve() const { return curve_; }
  const std::map<size_t, align::DurationVector>& frozen_durations() const { return durations_; }
  const acoustic::LossWeights& weights() const { return weights_; }
  const TrainConfig& train_config() const { return train_; }

 private:
  void freeze_aligner();
  void write_snapshot(const acoustic::LossBreakdown& parts, const std::vector<size_t>& batch, double lr);
  nlohmann::json meta() const;

  AcousticDataset data_;
  acoustic::AcousticConfig model_cfg_;
  acoustic::LossWeights weights_;
  TrainConfig train_;
  OptimizerConfig opt_cfg_;
  acoustic::FastPitch model_{nullptr};
  std::unique_ptr<torch::optim::Optimizer> optimizer_;
  std::shared_ptr<acoustic::FeatureExtractor> extractor_;
  std::filesystem::path output_dir_;
  LossCurve curve_;
  std::map<size_t, align::DurationVector> durations_;
  bool frozen_ = false;
  int64_t epoch_ = 0;
  int64_t batch_in_epoch_ = 0;
  int64_t global_step_ = 0;
};

// Everything needed to run a trained acoustic model.
struct AcousticBundle {
  acoustic::FastPitch model{nullptr};
  acoustic::Vocabulary vocabulary;
  ConditioningMaps conditioning;
  corpus::MelConfig mel_config;
  corpus::TextFrontend frontend;
};

// Throws Error{kFormat} for non-acoustic checkpoints.
AcousticBundle load_acoustic_checkpoint(const std::filesystem::path& path);

// Random-state helpers shared by the trainers.
torch::Tensor default_generator_state();
void set_default_generator_state(const torch::Tensor& state);

}  // namespace itts::train
