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

#include "itts/align/alignment.hpp"

namespace itts::align {

struct AlignerConfig {
  int64_t text_dim = 384;
  int64_t n_mels = 80;
  int64_t attention_dim = 80;
  double temperature = 0.0005;
};

// Learned key/query projections feeding the negative-L2 affinity. The
// forward signature only admits text embeddings and mel frames, so speaker
// and language conditioning can never reach the alignment path.
class AlignerImpl : public torch::nn::Module {
 public:
  explicit AlignerImpl(const AlignerConfig& cfg);

  // text_embeddings: [T_text, text_dim]; mel: [T_mel, n_mels].
  SoftAlignment forward(const torch::Tensor& text_embeddings, const torch::Tensor& mel);

  const AlignerConfig& config() const { return cfg_; }

 private:
  AlignerConfig cfg_;
  torch::nn::Conv1d key1_{nullptr}, key2_{nullptr};
  torch::nn::Conv1d query1_{nullptr}, query2_{nullptr}, query3_{nullptr};
};
TORCH_MODULE(Aligner);

}  // namespace itts::align
