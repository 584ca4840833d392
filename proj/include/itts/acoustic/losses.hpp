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
#include <utility>

#include "itts/acoustic/config.hpp"
#include "itts/align/alignment.hpp"
#include "itts/corpus/mel.hpp"

namespace itts::acoustic {

// Mean over cells of (m - m_hat)^2. Throws Error{kShapeMismatch}.
torch::Tensor spec_loss(const torch::Tensor& m, const torch::Tensor& m_hat);
torch::Tensor spec_loss(const corpus::MelSpectrogram& m, const corpus::MelSpectrogram& m_hat);

// (L_pitch, L_dur): MSE over tokens. Duration targets are compared in the
// log domain, log(max(d, 1)). Throws Error{kShapeMismatch} on length mismatch.
std::pair<torch::Tensor, torch::Tensor> prosody_losses(const torch::Tensor& pitch_hat,
                                                       const torch::Tensor& pitch_target,
                                                       const torch::Tensor& log_duration_hat,
                                                       const align::DurationVector& duration_target);

// Mean structural similarity over an 11x11 Gaussian window (sigma 1.5),
// C1 = 0.01^2, C2 = 0.03^2, after mapping the pair jointly onto [0, 1]
// with their common min and max.
torch::Tensor ssim(const torch::Tensor& m, const torch::Tensor& m_hat);
// 1 - ssim(m, m_hat); lies in [0, 2].
torch::Tensor ssim_loss(const torch::Tensor& m, const torch::Tensor& m_hat);

// Deterministic differentiable map from a [T, n_mels] mel to a feature
// tensor, standing in for an ASR network's convolutional front end.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual torch::Tensor extract(const torch::Tensor& mel) = 0;
};

class IdentityFeatureExtractor final : public FeatureExtractor {
 public:
  torch::Tensor extract(const torch::Tensor& mel) override { return mel; }
};

// Two VGG-style blocks (3x3 conv, ReLU, 2x2 max-pool; 8 and 16 channels)
// with weights drawn from a fixed seed and frozen. A pretrained checkpoint
// saved with save() can be loaded in its place.
class ConvFeatureExtractor final : public FeatureExtractor {
 public:
  explicit ConvFeatureExtractor(uint64_t seed = 1234);
  torch::Tensor extract(const torch::Tensor& mel) override;
  void load(const std::string& path);
  void save(const std::string& path) const;

 private:
  torch::nn::Sequential net_;
};

// Mean absolute difference between extractor(m) and extractor(m_hat).
torch::Tensor asr_consistency_loss(const torch::Tensor& m, const torch::Tensor& m_hat,
                                   FeatureExtractor& extractor);

// Scalar loss components (tensor form feeds the optimizer).
struct LossTerms {
  torch::Tensor spec, align, dur, pitch, binary, ssim, asr;
};

struct LossBreakdown {
  double spec = 0.0;
  double align = 0.0;
  double dur = 0.0;
  double pitch = 0.0;
  double binary = 0.0;
  double ssim = 0.0;
  double asr = 0.0;
  double acoustic = 0.0;
};

// L_acoustic = L_spec + sum_k lambda_k L_k. Fills breakdown.acoustic from the
// other fields. Throws Error{kNonFinite} if any component is not finite.
LossBreakdown total_loss(const LossBreakdown& parts, const LossWeights& w);

// Same weighted sum over tensors; undefined terms count as zero.
torch::Tensor total_loss(const LossTerms& terms, const LossWeights& w);

// Detached values of the terms plus the weighted total.
LossBreakdown breakdown_of(const LossTerms& terms, const LossWeights& w);

}  // namespace itts::acoustic
