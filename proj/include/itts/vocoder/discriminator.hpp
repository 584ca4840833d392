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

#include <vector>

#include <json.hpp>

namespace itts::vocoder {

struct DiscriminatorConfig {
  std::vector<int64_t> periods{2, 3, 5, 7, 11};
  int64_t num_scales = 3;
  // Channel widths are divided by this (1 = full size).
  int64_t channel_divisor = 1;

  static DiscriminatorConfig v1() { return {}; }
  static DiscriminatorConfig toy();
  bool operator==(const DiscriminatorConfig&) const = default;
};

void to_json(nlohmann::json& j, const DiscriminatorConfig& c);
void from_json(const nlohmann::json& j, DiscriminatorConfig& c);

// Scores and intermediate activations, scale discriminators first, then
// period discriminators in configured order.
struct DiscriminatorOutputs {
  std::vector<torch::Tensor> scores;
  std::vector<std::vector<torch::Tensor>> features;
};

class PeriodDiscriminatorImpl : public torch::nn::Module {
 public:
  PeriodDiscriminatorImpl(int64_t period, int64_t channel_divisor);
  // Reshapes [B, 1, T] to [B, 1, ceil(T/p), p], reflect-padding T up to a
  // multiple of the period.
  std::pair<torch::Tensor, std::vector<torch::Tensor>> forward(const torch::Tensor& audio);
  int64_t period() const { return period_; }

 private:
  int64_t period_;
  torch::nn::ModuleList convs_;
  torch::nn::Conv2d post_{nullptr};
};
TORCH_MODULE(PeriodDiscriminator);

class ScaleDiscriminatorImpl : public torch::nn::Module {
 public:
  explicit ScaleDiscriminatorImpl(int64_t channel_divisor);
  std::pair<torch::Tensor, std::vector<torch::Tensor>> forward(const torch::Tensor& audio);

 private:
  torch::nn::ModuleList convs_;
  torch::nn::Conv1d post_{nullptr};
};
TORCH_MODULE(ScaleDiscriminator);

// Multi-scale (raw, x2 and x4 average-pooled) plus multi-period ensemble.
class MultiDiscriminatorImpl : public torch::nn::Module {
 public:
  explicit MultiDiscriminatorImpl(const DiscriminatorConfig& cfg);

  // audio: [B, 1, T] or [T]. Throws Error{kInvalidArgument} when T is
  // shorter than the smallest period.
  DiscriminatorOutputs forward(const torch::Tensor& audio);

  size_t num_discriminators() const { return scales_->size() + periods_->size(); }
  const DiscriminatorConfig& config() const { return cfg_; }

 private:
  DiscriminatorConfig cfg_;
  torch::nn::ModuleList scales_;
  torch::nn::ModuleList periods_;
};
TORCH_MODULE(MultiDiscriminator);

// Right-pads [B, C, T] to a multiple of period (reflect, or zeros when the
// input is too short to reflect).
torch::Tensor pad_to_period(const torch::Tensor& audio, int64_t period);

}  // namespace itts::vocoder
