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

#include "itts/acoustic/config.hpp"

namespace itts::acoustic {

// [T, d] sinusoidal position table.
torch::Tensor sinusoidal_positions(int64_t length, int64_t dim, torch::Dtype dtype);

// Post-norm Transformer block: self-attention then a two-layer 1-D
// convolutional feed-forward, each with residual, dropout and LayerNorm.
class FFTBlockImpl : public torch::nn::Module {
 public:
  explicit FFTBlockImpl(const EncoderConfig& cfg);
  torch::Tensor forward(const torch::Tensor& x);  // [T, d] -> [T, d]

 private:
  int64_t num_heads_;
  int64_t head_dim_;
  double dropout_;
  torch::nn::Linear qkv_{nullptr}, out_{nullptr};
  torch::nn::LayerNorm attn_norm_{nullptr}, ffn_norm_{nullptr};
  torch::nn::Conv1d ffn1_{nullptr}, ffn2_{nullptr};
};
TORCH_MODULE(FFTBlock);

// Positional encoding followed by num_blocks FFT blocks.
class FFTransformerImpl : public torch::nn::Module {
 public:
  explicit FFTransformerImpl(const EncoderConfig& cfg);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  EncoderConfig cfg_;
  torch::nn::ModuleList blocks_;
};
TORCH_MODULE(FFTransformer);

// Stacked Conv1d -> ReLU -> LayerNorm -> dropout, then a linear head
// producing one scalar per input row.
class TemporalPredictorImpl : public torch::nn::Module {
 public:
  TemporalPredictorImpl(int64_t input_dim, const PredictorConfig& cfg);
  torch::Tensor forward(const torch::Tensor& x);  // [T, d] -> [T]

 private:
  PredictorConfig cfg_;
  torch::nn::ModuleList convs_;
  torch::nn::ModuleList norms_;
  torch::nn::Linear head_{nullptr};
};
TORCH_MODULE(TemporalPredictor);

}  // namespace itts::acoustic
