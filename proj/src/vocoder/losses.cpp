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

#include "itts/vocoder/losses.hpp"

#include <string>

#include "itts/error.hpp"

namespace itts::vocoder {

namespace {

void require_pair(const torch::Tensor& real, const torch::Tensor& fake) {
  if (real.sizes() != fake.sizes()) {
    throw Error(ErrorCode::kShapeMismatch, "real and generated audio lengths differ");
  }
}

}  // namespace

torch::Tensor discriminator_loss(const std::vector<torch::Tensor>& real_scores,
                                 const std::vector<torch::Tensor>& fake_scores) {
  if (real_scores.size() != fake_scores.size() || real_scores.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "discriminator score lists differ");
  }
  torch::Tensor loss = torch::zeros({}, real_scores.front().options());
  for (size_t i = 0; i < real_scores.size(); ++i) {
    loss = loss + (real_scores[i] - 1.0).square().mean() + fake_scores[i].square().mean();
  }
  return loss;
}

torch::Tensor adversarial_loss(const std::vector<torch::Tensor>& fake_scores) {
  if (fake_scores.empty()) throw Error(ErrorCode::kShapeMismatch, "no discriminator scores");
  torch::Tensor loss = torch::zeros({}, fake_scores.front().options());
  for (const auto& s : fake_scores) loss = loss + (s - 1.0).square().mean();
  return loss;
}

torch::Tensor feature_matching_loss(const std::vector<std::vector<torch::Tensor>>& real_features,
                                    const std::vector<std::vector<torch::Tensor>>& fake_features) {
  if (real_features.size() != fake_features.size() || real_features.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "feature lists differ in discriminator count");
  }
  torch::Tensor loss;
  for (size_t d = 0; d < real_features.size(); ++d) {
    if (real_features[d].size() != fake_features[d].size()) {
      throw Error(ErrorCode::kShapeMismatch, "feature lists differ in layer count");
    }
    for (size_t l = 0; l < real_features[d].size(); ++l) {
      auto term = (real_features[d][l] - fake_features[d][l]).abs().mean();
      loss = loss.defined() ? loss + term : term;
    }
  }
  return loss;
}

torch::Tensor mel_l1_loss(const torch::Tensor& real, const torch::Tensor& fake, const corpus::MelConfig& cfg) {
  require_pair(real, fake);
  auto flat_real = real.reshape({-1, real.size(-1)});
  auto flat_fake = fake.reshape({-1, fake.size(-1)});
  return (corpus::log_mel(flat_real, cfg) - corpus::log_mel(flat_fake, cfg)).abs().mean();
}

GeneratorLoss vocoder_generator_loss(const torch::Tensor& real, const torch::Tensor& fake,
                                     MultiDiscriminator& discriminator, const corpus::MelConfig& mel_cfg,
                                     const GeneratorLossWeights& w) {
  require_pair(real, fake);
  GeneratorLoss out;
  auto fake_out = discriminator->forward(fake);
  DiscriminatorOutputs real_out;
  {
    torch::NoGradGuard no_grad;
    real_out = discriminator->forward(real);
  }
  out.adversarial = adversarial_loss(fake_out.scores);
  out.feature_matching = feature_matching_loss(real_out.features, fake_out.features);
  out.mel = mel_l1_loss(real, fake, mel_cfg);
  out.total = w.adversarial * out.adversarial + w.feature_matching * out.feature_matching + w.mel * out.mel;
  return out;
}

torch::Tensor vocoder_discriminator_loss(const torch::Tensor& real, const torch::Tensor& fake,
                                         MultiDiscriminator& discriminator) {
  require_pair(real, fake);
  auto real_out = discriminator->forward(real);
  auto fake_out = discriminator->forward(fake.detach());
  return discriminator_loss(real_out.scores, fake_out.scores);
}

}  // namespace itts::vocoder
