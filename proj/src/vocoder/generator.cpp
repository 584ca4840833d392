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

#include "itts/vocoder/generator.hpp"

#include <numeric>
#include <string>

#include "itts/error.hpp"

namespace itts::vocoder {

namespace nn = torch::nn;
namespace F = torch::nn::functional;

namespace {

constexpr double kLeakySlope = 0.1;

torch::Tensor leaky(const torch::Tensor& x) {
  return F::leaky_relu(x, F::LeakyReLUFuncOptions().negative_slope(kLeakySlope));
}

int64_t same_padding(int64_t kernel, int64_t dilation) { return (kernel * dilation - dilation) / 2; }

void init_normal(nn::Module& m, double std) {
  torch::NoGradGuard no_grad;
  for (auto& p : m.named_parameters(/*recurse=*/false)) {
    if (p.key() == "weight") p.value().normal_(0.0, std);
  }
}

}  // namespace

GeneratorConfig GeneratorConfig::v1() { return {}; }

GeneratorConfig GeneratorConfig::toy() {
  GeneratorConfig c;
  c.upsample_initial_channel = 128;
  return c;
}

int64_t GeneratorConfig::upsample_factor() const {
  return std::accumulate(upsample_rates.begin(), upsample_rates.end(), int64_t{1}, std::multiplies<>());
}

void GeneratorConfig::validate(int hop_length) const {
  if (upsample_rates.empty() || upsample_rates.size() != upsample_kernel_sizes.size()) {
    throw Error(ErrorCode::kInvalidArgument, "upsample rates and kernel sizes must pair up");
  }
  if (upsample_factor() != hop_length) {
    throw Error(ErrorCode::kInvalidArgument,
                "upsample product " + std::to_string(upsample_factor()) + " != hop length " +
                    std::to_string(hop_length));
  }
  for (size_t i = 0; i < upsample_rates.size(); ++i) {
    if (upsample_kernel_sizes[i] < upsample_rates[i] ||
        (upsample_kernel_sizes[i] - upsample_rates[i]) % 2 != 0) {
      throw Error(ErrorCode::kInvalidArgument, "upsample kernel must exceed its rate by an even amount");
    }
  }
  if ((upsample_initial_channel >> upsample_rates.size()) < 1 ||
      upsample_initial_channel % (int64_t{1} << upsample_rates.size()) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "initial channels must halve cleanly at every stage");
  }
  if (resblock_kernel_sizes.empty() || resblock_dilations.empty() || n_mels <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid residual block configuration");
  }
}

void to_json(nlohmann::json& j, const GeneratorConfig& c) {
  j = {{"n_mels", c.n_mels},
       {"upsample_rates", c.upsample_rates},
       {"upsample_kernel_sizes", c.upsample_kernel_sizes},
       {"upsample_initial_channel", c.upsample_initial_channel},
       {"resblock_kernel_sizes", c.resblock_kernel_sizes},
       {"resblock_dilations", c.resblock_dilations}};
}

void from_json(const nlohmann::json& j, GeneratorConfig& c) {
  c.n_mels = j.value("n_mels", c.n_mels);
  c.upsample_rates = j.value("upsample_rates", c.upsample_rates);
  c.upsample_kernel_sizes = j.value("upsample_kernel_sizes", c.upsample_kernel_sizes);
  c.upsample_initial_channel = j.value("upsample_initial_channel", c.upsample_initial_channel);
  c.resblock_kernel_sizes = j.value("resblock_kernel_sizes", c.resblock_kernel_sizes);
  c.resblock_dilations = j.value("resblock_dilations", c.resblock_dilations);
}

ResBlockImpl::ResBlockImpl(int64_t channels, int64_t kernel, const std::vector<int64_t>& dilations) {
  dilated_ = register_module("dilated", nn::ModuleList());
  plain_ = register_module("plain", nn::ModuleList());
  for (int64_t d : dilations) {
    nn::Conv1d a(nn::Conv1dOptions(channels, channels, kernel).dilation(d).padding(same_padding(kernel, d)));
    nn::Conv1d b(nn::Conv1dOptions(channels, channels, kernel).padding(same_padding(kernel, 1)));
    init_normal(*a, 0.01);
    init_normal(*b, 0.01);
    dilated_->push_back(a);
    plain_->push_back(b);
  }
}

torch::Tensor ResBlockImpl::forward(torch::Tensor x) {
  for (size_t i = 0; i < dilated_->size(); ++i) {
    auto t = dilated_[i]->as<nn::Conv1d>()->forward(leaky(x));
    t = plain_[i]->as<nn::Conv1d>()->forward(leaky(t));
    x = x + t;
  }
  return x;
}

GeneratorImpl::GeneratorImpl(const GeneratorConfig& cfg) : cfg_(cfg) {
  const int64_t c0 = cfg.upsample_initial_channel;
  conv_pre_ = register_module("conv_pre", nn::Conv1d(nn::Conv1dOptions(cfg.n_mels, c0, 7).padding(3)));
  ups_ = register_module("ups", nn::ModuleList());
  resblocks_ = register_module("resblocks", nn::ModuleList());
  int64_t ch = c0;
  for (size_t i = 0; i < cfg.upsample_rates.size(); ++i) {
    const int64_t u = cfg.upsample_rates[i], k = cfg.upsample_kernel_sizes[i];
    nn::ConvTranspose1d up(nn::ConvTranspose1dOptions(ch, ch / 2, k).stride(u).padding((k - u) / 2));
    init_normal(*up, 0.01);
    ups_->push_back(up);
    ch /= 2;
    for (int64_t rk : cfg.resblock_kernel_sizes) resblocks_->push_back(ResBlock(ch, rk, cfg.resblock_dilations));
  }
  conv_post_ = register_module("conv_post", nn::Conv1d(nn::Conv1dOptions(ch, 1, 7).padding(3)));
  to(torch::kFloat64);
}

torch::Tensor GeneratorImpl::forward(const torch::Tensor& mel) {
  if (mel.dim() != 3 || mel.size(1) != cfg_.n_mels) {
    throw Error(ErrorCode::kShapeMismatch, "generator input must be [B, n_mels, T]");
  }
  const size_t kernels = cfg_.resblock_kernel_sizes.size();
  auto x = conv_pre_(mel);
  for (size_t i = 0; i < ups_->size(); ++i) {
    x = ups_[i]->as<nn::ConvTranspose1d>()->forward(leaky(x));
    torch::Tensor acc;
    for (size_t j = 0; j < kernels; ++j) {
      auto r = resblocks_[i * kernels + j]->as<ResBlock>()->forward(x);
      acc = acc.defined() ? acc + r : r;
    }
    x = acc / static_cast<double>(kernels);
  }
  // Default leaky_relu slope (0.01) before the output projection.
  x = conv_post_(F::leaky_relu(x, F::LeakyReLUFuncOptions().negative_slope(0.01)));
  return torch::tanh(x);
}

corpus::AudioClip generate_waveform(Generator& generator, const corpus::MelSpectrogram& mel) {
  const auto& cfg = generator->config();
  if (mel.num_mels() != cfg.n_mels || mel.config.n_mels != cfg.n_mels) {
    throw Error(ErrorCode::kShapeMismatch,
                "mel has " + std::to_string(mel.num_mels()) + " bins, generator expects " +
                    std::to_string(cfg.n_mels));
  }
  if (mel.config.hop_length != cfg.upsample_factor()) {
    throw Error(ErrorCode::kInvalidArgument,
                "mel hop " + std::to_string(mel.config.hop_length) + " does not match generator upsampling " +
                    std::to_string(cfg.upsample_factor()));
  }
  torch::NoGradGuard no_grad;
  const bool was_training = generator->is_training();
  generator->eval();
  auto audio = generator->forward(mel.frames.t().unsqueeze(0).to(torch::kFloat64));
  if (was_training) generator->train();
  return corpus::to_clip(audio, mel.config.sample_rate);
}

}  // namespace itts::vocoder
