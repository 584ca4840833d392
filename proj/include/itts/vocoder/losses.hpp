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

#include "itts/corpus/mel.hpp"
#include "itts/vocoder/discriminator.hpp"

namespace itts::vocoder {

// Least-squares GAN terms, summed over discriminators.
// sum_d [mean((D(real) - 1)^2) + mean(D(fake)^2)]
torch::Tensor discriminator_loss(const std::vector<torch::Tensor>& real_scores,
                                 const std::vector<torch::Tensor>& fake_scores);
// sum_d mean((D(fake) - 1)^2)
torch::Tensor adversarial_loss(const std::vector<torch::Tensor>& fake_scores);
// sum over discriminators and layers of mean |real - fake|.
torch::Tensor feature_matching_loss(const std::vector<std::vector<torch::Tensor>>& real_features,
                                    const std::vector<std::vector<torch::Tensor>>& fake_features);
// mean |log_mel(real) - log_mel(fake)|
torch::Tensor mel_l1_loss(const torch::Tensor& real, const torch::Tensor& fake,
                          const corpus::MelConfig& cfg);

struct GeneratorLossWeights {
  double adversarial = 1.0;
  double feature_matching = 2.0;
  double mel = 45.0;
};

struct GeneratorLoss {
  torch::Tensor adversarial, feature_matching, mel, total;
};

// real, fake: [B, 1, T] of equal length. Throws Error{kShapeMismatch}.
GeneratorLoss vocoder_generator_loss(const torch::Tensor& real, const torch::Tensor& fake,
                                     MultiDiscriminator& discriminator, const corpus::MelConfig& mel_cfg,
                                     const GeneratorLossWeights& w = {});

// Scores fake.detach(). Throws Error{kShapeMismatch}.
torch::Tensor vocoder_discriminator_loss(const torch::Tensor& real, const torch::Tensor& fake,
                                         MultiDiscriminator& discriminator);

}  // namespace itts::vocoder
