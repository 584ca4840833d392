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

#include "itts/corpus/mel.hpp"

namespace itts::vocoder {

struct GeneratorConfig {
  int64_t n_mels = 80;
  std::vector<int64_t> upsample_rates{8, 8, 2, 2};
  std::vector<int64_t> upsample_kernel_sizes{16, 16, 4, 4};
  int64_t upsample_initial_channel = 512;
  std::vector<int64_t> resblock_kernel_sizes{3, 7, 11};
  std::vector<int64_t> resblock_dilations{1, 3, 5};

  // 512 initial channels.
  static GeneratorConfig v1();
  // 128 initial channels; same rates and kernels.
  static GeneratorConfig toy();

  int64_t upsample_factor() const;
  // Throws Error{kInvalidArgument} unless the upsample product equals
  // hop_length and every stage halves an even channel count.
  void validate(int hop_length = 256) const;
  bool operator==(const GeneratorConfig&) const = default;
};

void to_json(nlohmann::json& j, const GeneratorConfig& c);
void from_json(const nlohmann::json& j, GeneratorConfig& c);

// Multi-receptive-field residual block: for each dilation,
// x += conv(leaky(conv_dilated(leaky(x)))).
class ResBlockImpl : public torch::nn::Module {
 public:
  ResBlockImpl(int64_t channels, int64_t kernel, const std::vector<int64_t>& dilations);
  torch::Tensor forward(torch::Tensor x);

 private:
  torch::nn::ModuleList dilated_, plain_;
};
TORCH_MODULE(ResBlock);

// Mel-to-waveform generator: conv_pre, transposed-convolution upsampling
// stages each followed by averaged residual blocks, conv_post and tanh.
class GeneratorImpl : public torch::nn::Module {
 public:
  explicit GeneratorImpl(const GeneratorConfig& cfg);

  // mel: [B, n_mels, T] -> [B, 1, T * upsample_factor]
  torch::Tensor forward(const torch::Tensor& mel);

  const GeneratorConfig& config() const { return cfg_; }

 private:
  GeneratorConfig cfg_;
  torch::nn::Conv1d conv_pre_{nullptr}, conv_post_{nullptr};
  torch::nn::ModuleList ups_;
  torch::nn::ModuleList resblocks_;
};
TORCH_MODULE(Generator);

// Throws Error{kShapeMismatch} when mel.n_mels differs from the generator,
// Error{kInvalidArgument} when the mel hop differs from the upsample factor.
corpus::AudioClip generate_waveform(Generator& generator, const corpus::MelSpectrogram& mel);

}  // namespace itts::vocoder
