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

#include "itts/acoustic/layers.hpp"

#include <cmath>

namespace itts::acoustic {

namespace nn = torch::nn;
namespace F = torch::nn::functional;

torch::Tensor sinusoidal_positions(int64_t length, int64_t dim, torch::Dtype dtype) {
  auto pos = torch::arange(length, torch::kFloat64).unsqueeze(1);
  auto idx = torch::arange(0, dim, 2, torch::kFloat64);
  auto inv_freq = torch::exp(-std::log(10000.0) * idx / static_cast<double>(dim));
  auto angles = pos * inv_freq.unsqueeze(0);  // [T, ceil(d/2)]
  auto table = torch::zeros({length, dim}, torch::kFloat64);
  table.index_put_({torch::indexing::Slice(), torch::indexing::Slice(0, dim, 2)}, angles.sin());
  table.index_put_({torch::indexing::Slice(), torch::indexing::Slice(1, dim, 2)},
                   angles.cos().index({torch::indexing::Slice(), torch::indexing::Slice(0, dim / 2)}));
  return table.to(dtype);
}

FFTBlockImpl::FFTBlockImpl(const EncoderConfig& cfg)
    : num_heads_(cfg.num_heads), head_dim_(cfg.model_dim / cfg.num_heads), dropout_(cfg.dropout) {
  const int64_t d = cfg.model_dim;
  qkv_ = register_module("qkv", nn::Linear(d, 3 * d));
  out_ = register_module("out", nn::Linear(d, d));
  attn_norm_ = register_module("attn_norm", nn::LayerNorm(nn::LayerNormOptions({d})));
  ffn1_ = register_module("ffn1", nn::Conv1d(nn::Conv1dOptions(d, cfg.ffn_hidden_dim, cfg.ffn_kernel)
                                                 .padding(cfg.ffn_kernel / 2)));
  ffn2_ = register_module("ffn2", nn::Conv1d(nn::Conv1dOptions(cfg.ffn_hidden_dim, d, cfg.ffn_kernel)
                                                 .padding(cfg.ffn_kernel / 2)));
  ffn_norm_ = register_module("ffn_norm", nn::LayerNorm(nn::LayerNormOptions({d})));
}

torch::Tensor FFTBlockImpl::forward(const torch::Tensor& x) {
  const int64_t t = x.size(0);
  auto qkv = qkv_(x).view({t, 3, num_heads_, head_dim_}).permute({1, 2, 0, 3});  // [3, H, T, Dh]
  auto q = qkv[0], k = qkv[1], v = qkv[2];
  auto scores = torch::matmul(q, k.transpose(1, 2)) / std::sqrt(static_cast<double>(head_dim_));
  auto weights = F::dropout(torch::softmax(scores, -1), F::DropoutFuncOptions().p(dropout_).training(is_training()));
  auto attn = torch::matmul(weights, v).permute({1, 0, 2}).reshape({t, num_heads_ * head_dim_});
  attn = F::dropout(out_(attn), F::DropoutFuncOptions().p(dropout_).training(is_training()));
  auto h = attn_norm_(x + attn);

  auto ff = h.t().unsqueeze(0);
  ff = ffn2_(torch::relu(ffn1_(ff))).squeeze(0).t();
  ff = F::dropout(ff, F::DropoutFuncOptions().p(dropout_).training(is_training()));
  return ffn_norm_(h + ff);
}

FFTransformerImpl::FFTransformerImpl(const EncoderConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  blocks_ = register_module("blocks", nn::ModuleList());
  for (int64_t i = 0; i < cfg.num_blocks; ++i) blocks_->push_back(FFTBlock(cfg));
}

torch::Tensor FFTransformerImpl::forward(const torch::Tensor& x) {
  auto h = x + sinusoidal_positions(x.size(0), cfg_.model_dim, x.scalar_type());
  h = F::dropout(h, F::DropoutFuncOptions().p(cfg_.dropout).training(is_training()));
  for (const auto& block : *blocks_) h = block->as<FFTBlock>()->forward(h);
  return h;
}

TemporalPredictorImpl::TemporalPredictorImpl(int64_t input_dim, const PredictorConfig& cfg) : cfg_(cfg) {
  convs_ = register_module("convs", nn::ModuleList());
  norms_ = register_module("norms", nn::ModuleList());
  int64_t in = input_dim;
  for (int64_t i = 0; i < cfg.num_layers; ++i) {
    convs_->push_back(nn::Conv1d(nn::Conv1dOptions(in, cfg.filter_size, cfg.kernel_size)
                                     .padding(cfg.kernel_size / 2)));
    norms_->push_back(nn::LayerNorm(nn::LayerNormOptions({cfg.filter_size})));
    in = cfg.filter_size;
  }
  head_ = register_module("head", nn::Linear(in, 1));
}

torch::Tensor TemporalPredictorImpl::forward(const torch::Tensor& x) {
  auto h = x;
  for (size_t i = 0; i < convs_->size(); ++i) {
    h = convs_[i]->as<nn::Conv1d>()->forward(h.t().unsqueeze(0)).squeeze(0).t();
    h = norms_[i]->as<nn::LayerNorm>()->forward(torch::relu(h));
    h = F::dropout(h, F::DropoutFuncOptions().p(cfg_.dropout).training(is_training()));
  }
  return head_(h).squeeze(-1);
}

}  // namespace itts::acoustic
