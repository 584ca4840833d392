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

#include "itts/align/aligner.hpp"

#include "itts/error.hpp"

namespace itts::align {

namespace nn = torch::nn;

AlignerImpl::AlignerImpl(const AlignerConfig& cfg) : cfg_(cfg) {
  key1_ = register_module("key1", nn::Conv1d(nn::Conv1dOptions(cfg.text_dim, 2 * cfg.text_dim, 3).padding(1)));
  key2_ = register_module("key2", nn::Conv1d(nn::Conv1dOptions(2 * cfg.text_dim, cfg.attention_dim, 1)));
  query1_ = register_module("query1", nn::Conv1d(nn::Conv1dOptions(cfg.n_mels, 2 * cfg.n_mels, 3).padding(1)));
  query2_ = register_module("query2", nn::Conv1d(nn::Conv1dOptions(2 * cfg.n_mels, cfg.n_mels, 1)));
  query3_ = register_module("query3", nn::Conv1d(nn::Conv1dOptions(cfg.n_mels, cfg.attention_dim, 1)));
  to(torch::kFloat64);
}

SoftAlignment AlignerImpl::forward(const torch::Tensor& text_embeddings, const torch::Tensor& mel) {
  if (text_embeddings.dim() != 2 || text_embeddings.size(1) != cfg_.text_dim) {
    throw Error(ErrorCode::kShapeMismatch, "aligner text input must be [T_text, text_dim]");
  }
  if (mel.dim() != 2 || mel.size(1) != cfg_.n_mels) {
    throw Error(ErrorCode::kShapeMismatch, "aligner mel input must be [T_mel, n_mels]");
  }
  // Conv1d wants [B, C, T].
  auto keys = text_embeddings.t().unsqueeze(0);
  keys = key2_(torch::relu(key1_(keys))).squeeze(0).t();  // [T_text, A]
  auto queries = mel.t().unsqueeze(0);
  queries = query3_(torch::relu(query2_(torch::relu(query1_(queries))))).squeeze(0).t();
  return soft_alignment_from_affinity(cfg_.temperature * pairwise_affinity(keys, queries));
}

}  // namespace itts::align
