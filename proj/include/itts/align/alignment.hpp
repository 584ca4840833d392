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

#include <iosfwd>
#include <string_view>
#include <vector>

namespace itts::align {

// Column-stochastic T_text x T_mel alignment held as log-probabilities; each
// mel-frame column is a softmax over the text axis.
struct SoftAlignment {
  torch::Tensor log_probs;

  torch::Tensor probs() const { return log_probs.exp(); }
  int64_t text_length() const { return log_probs.size(0); }
  int64_t mel_length() const { return log_probs.size(1); }

  // Wraps an explicit probability matrix; columns must sum to 1 within 1e-6
  // and entries must be positive (Error{kValidation} otherwise).
  static SoftAlignment from_probs(const torch::Tensor& probs);
};

// Monotonic complete path: token_of_frame[t] is the 0-based token assigned to
// frame t, starting at 0, ending at num_tokens - 1, advancing by 0 or 1.
struct HardAlignment {
  std::vector<int64_t> token_of_frame;
  int64_t num_tokens = 0;

  int64_t mel_length() const { return static_cast<int64_t>(token_of_frame.size()); }
  bool is_valid() const;
  // Dense T_text x T_mel 0/1 matrix.
  torch::Tensor dense(torch::Dtype dtype = torch::kFloat64) const;
};

struct DurationVector {
  std::vector<int64_t> frames;

  int64_t total() const;
  size_t size() const { return frames.size(); }
};

// Negative squared Euclidean distance between every text row and mel row:
// out[i][j] = -|text[i] - mel[j]|^2. Both inputs are [T, d] with equal d.
torch::Tensor pairwise_affinity(const torch::Tensor& text_feats, const torch::Tensor& mel_feats);

// Softmax over the text axis of a T_text x T_mel affinity matrix.
SoftAlignment soft_alignment_from_affinity(const torch::Tensor& affinity);

// soft_alignment_from_affinity(pairwise_affinity(text, mel)). Throws
// Error{kShapeMismatch} when feature widths differ, Error{kInvalidArgument}
// for empty inputs.
SoftAlignment soft_alignment(const torch::Tensor& text_feats, const torch::Tensor& mel_feats);

// -log of the total probability of all monotonic complete paths, via the
// blank-free forward algorithm in log space. Differentiable with respect to
// soft.log_probs (backward pass uses the forward-backward occupancies).
// Throws Error{kInfeasibleAlignment} when T_mel < T_text.
torch::Tensor forward_sum_loss(const SoftAlignment& soft);

// Most probable monotonic complete path. Ties prefer staying on the current
// token. Throws Error{kInfeasibleAlignment} when T_mel < T_text.
HardAlignment viterbi_hard(const SoftAlignment& soft);

// Sum of log-probabilities along the path.
double path_log_prob(const SoftAlignment& soft, const HardAlignment& hard);

// sum(-hard (.) log soft). Throws Error{kShapeMismatch}.
torch::Tensor binarization_loss(const HardAlignment& hard, const SoftAlignment& soft);

DurationVector durations_from_hard(const HardAlignment& hard);

// Plain-text dense matrix dump:
//   # <kind> <rows> <cols>
//   one whitespace-separated row per line, %.17g
void write_alignment_text(std::ostream& out, const torch::Tensor& matrix,
                          std::string_view kind);
torch::Tensor read_alignment_text(std::istream& in);

}  // namespace itts::align
