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

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "itts/acoustic/config.hpp"

namespace itts::train {

struct OptimizerConfig {
  std::string algorithm = "adam";  // "adam" or "adamw"
  double learning_rate = 1e-4;
  double beta1 = 0.99;
  double beta2 = 0.998;
  double eps = 1e-8;
  double weight_decay = 1e-6;
  std::string lr_schedule = "warmup_constant";  // or "constant"
  double warmup_fraction = 0.01;

  // Adam(0.99, 0.998), weight decay 1e-6.
  static OptimizerConfig acoustic_default() { return {}; }
  // AdamW(0.8, 0.99), lr 2e-4, no weight decay.
  static OptimizerConfig vocoder_default();

  void validate() const;
  // Learning rate at a 0-based step of a run with total_steps steps.
  double learning_rate_at(int64_t step, int64_t total_steps) const;
};

struct TrainConfig {
  int64_t total_epochs = 2500;
  int64_t batch_size = 32;
  double aligner_off_fraction = 0.6;
  uint64_t seed = 1234;
  int64_t checkpoint_interval = 100;  // epochs; 0 = final checkpoint only
  double grad_clip_norm = 1000.0;     // 0 disables clipping
  bool reproducible = true;           // single-threaded math, fixed data order
  // Vocoder only: training crop length in samples (multiple of the hop).
  int64_t segment_size = 8192;

  void validate() const;
  // First epoch with the aligner switched off: round(fraction * total_epochs).
  int64_t aligner_cutoff_epoch() const;
};

struct AlignerWeights {
  double align = 0.0;
  double binary = 0.0;
  bool active = false;
};

// Configured lambda_align / lambda_binary while epoch < cutoff, zero after.
AlignerWeights aligner_schedule(int64_t epoch, const TrainConfig& cfg,
                                const acoustic::LossWeights& weights = {});

// Adam or AdamW over params according to cfg.
std::unique_ptr<torch::optim::Optimizer> make_optimizer(const OptimizerConfig& cfg,
                                                        std::vector<torch::Tensor> params);
void set_learning_rate(torch::optim::Optimizer& optimizer, double lr);

// Deterministic permutation of [0, n) for an epoch (splitmix64-driven
// Fisher-Yates, identical on every platform).
std::vector<size_t> epoch_order(size_t n, uint64_t seed, int64_t epoch);

void to_json(nlohmann::json& j, const OptimizerConfig& c);
void from_json(const nlohmann::json& j, OptimizerConfig& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

}  // namespace itts::train
