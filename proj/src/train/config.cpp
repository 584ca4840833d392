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

#include "itts/train/config.hpp"

#include <algorithm>
#include <cmath>

#include "itts/error.hpp"

namespace itts::train {

namespace {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

OptimizerConfig OptimizerConfig::vocoder_default() {
  OptimizerConfig c;
  c.algorithm = "adamw";
  c.learning_rate = 2e-4;
  c.beta1 = 0.8;
  c.beta2 = 0.99;
  c.weight_decay = 0.0;
  c.lr_schedule = "constant";
  return c;
}

void OptimizerConfig::validate() const {
  if (algorithm != "adam" && algorithm != "adamw") {
    throw Error(ErrorCode::kInvalidArgument, "unknown optimizer '" + algorithm + "'");
  }
  if (lr_schedule != "warmup_constant" && lr_schedule != "constant") {
    throw Error(ErrorCode::kInvalidArgument, "unknown lr schedule '" + lr_schedule + "'");
  }
  if (!(learning_rate > 0.0) || !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) ||
      !(weight_decay >= 0.0) || !(warmup_fraction >= 0.0 && warmup_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "optimizer hyper-parameters out of range");
  }
}

double OptimizerConfig::learning_rate_at(int64_t step, int64_t total_steps) const {
  if (lr_schedule == "constant") return learning_rate;
  const auto warmup = std::max<int64_t>(
      1, static_cast<int64_t>(std::llround(warmup_fraction * static_cast<double>(total_steps))));
  return learning_rate * std::min(1.0, static_cast<double>(step + 1) / static_cast<double>(warmup));
}

void TrainConfig::validate() const {
  if (total_epochs <= 0 || batch_size <= 0 || checkpoint_interval < 0 || segment_size <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "epochs, batch size and segment size must be positive");
  }
  if (!(aligner_off_fraction >= 0.0 && aligner_off_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "aligner_off_fraction must lie in [0, 1]");
  }
  if (!(grad_clip_norm >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "grad_clip_norm must be >= 0");
}

int64_t TrainConfig::aligner_cutoff_epoch() const {
  return static_cast<int64_t>(std::llround(aligner_off_fraction * static_cast<double>(total_epochs)));
}

AlignerWeights aligner_schedule(int64_t epoch, const TrainConfig& cfg, const acoustic::LossWeights& weights) {
  if (epoch < cfg.aligner_cutoff_epoch()) return {weights.align, weights.binary, true};
  return {0.0, 0.0, false};
}

std::unique_ptr<torch::optim::Optimizer> make_optimizer(const OptimizerConfig& cfg,
                                                        std::vector<torch::Tensor> params) {
  cfg.validate();
  if (cfg.algorithm == "adamw") {
    return std::make_unique<torch::optim::AdamW>(
        std::move(params), torch::optim::AdamWOptions(cfg.learning_rate)
                               .betas({cfg.beta1, cfg.beta2})
                               .eps(cfg.eps)
                               .weight_decay(cfg.weight_decay));
  }
  return std::make_unique<torch::optim::Adam>(
      std::move(params), torch::optim::AdamOptions(cfg.learning_rate)
                             .betas({cfg.beta1, cfg.beta2})
                             .eps(cfg.eps)
                             .weight_decay(cfg.weight_decay));
}

void set_learning_rate(torch::optim::Optimizer& optimizer, double lr) {
  for (auto& group : optimizer.param_groups()) group.options().set_lr(lr);
}

std::vector<size_t> epoch_order(size_t n, uint64_t seed, int64_t epoch) {
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  uint64_t state = seed ^ (0x5851f42d4c957f2dULL * static_cast<uint64_t>(epoch + 1));
  for (size_t i = n; i > 1; --i) {
    const size_t j = static_cast<size_t>(splitmix64(state) % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

void to_json(nlohmann::json& j, const OptimizerConfig& c) {
  j = {{"algorithm", c.algorithm}, {"learning_rate", c.learning_rate}, {"beta1", c.beta1},
       {"beta2", c.beta2}, {"eps", c.eps}, {"weight_decay", c.weight_decay},
       {"lr_schedule", c.lr_schedule}, {"warmup_fraction", c.warmup_fraction}};
}

void from_json(const nlohmann::json& j, OptimizerConfig& c) {
  c.algorithm = j.value("algorithm", c.algorithm);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.eps = j.value("eps", c.eps);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.lr_schedule = j.value("lr_schedule", c.lr_schedule);
  c.warmup_fraction = j.value("warmup_fraction", c.warmup_fraction);
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"total_epochs", c.total_epochs}, {"batch_size", c.batch_size},
       {"aligner_off_fraction", c.aligner_off_fraction}, {"seed", c.seed},
       {"checkpoint_interval", c.checkpoint_interval}, {"grad_clip_norm", c.grad_clip_norm},
       {"reproducible", c.reproducible}, {"segment_size", c.segment_size}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.total_epochs = j.value("total_epochs", c.total_epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.aligner_off_fraction = j.value("aligner_off_fraction", c.aligner_off_fraction);
  c.seed = j.value("seed", c.seed);
  c.checkpoint_interval = j.value("checkpoint_interval", c.checkpoint_interval);
  c.grad_clip_norm = j.value("grad_clip_norm", c.grad_clip_norm);
  c.reproducible = j.value("reproducible", c.reproducible);
  c.segment_size = j.value("segment_size", c.segment_size);
}

}  // namespace itts::train
