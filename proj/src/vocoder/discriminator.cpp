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

#include "itts/vocoder/discriminator.hpp"

#include <algorithm>
#include <string>

#include "itts/error.hpp"

namespace itts::vocoder {

namespace nn = torch::nn;
namespace F = torch::nn::functional;

namespace {

torch::Tensor leaky(const torch::Tensor& x) {
  return F::leaky_relu(x, F::LeakyReLUFuncOptions().negative_slope(0.1));
}

int64_t width(int64_t base, int64_t divisor, int64_t floor = 1) {
  return std::max(floor, base / divisor);
}

}  // namespace

DiscriminatorConfig DiscriminatorConfig::toy() {
  DiscriminatorConfig c;
  c.channel_divisor = 8;
  return c;
}

void to_json(nlohmann::json& j, const DiscriminatorConfig& c) {
  j = {{"periods", c.periods}, {"num_scales", c.num_scales}, {"channel_divisor", c.channel_divisor}};
}

void from_json(const nlohmann::json& j, DiscriminatorConfig& c) {
  c.periods = j.value("periods", c.periods);
  c.num_scales = j.value("num_scales", c.num_scales);
  c.channel_divisor = j.value("channel_divisor", c.channel_divisor);
}

torch::Tensor pad_to_period(const torch::Tensor& audio, int64_t period) {
  const int64_t t = audio.size(-1);
  const int64_t rem = t % period;
  if (rem == 0) return audio;
  const int64_t pad = period - rem;
  if (pad < t) return F::pad(audio, F::PadFuncOptions({0, pad}).mode(torch::kReflect));
  return F::pad(audio, F::PadFuncOptions({0, pad}));
}

PeriodDiscriminatorImpl::PeriodDiscriminatorImpl(int64_t period, int64_t channel_divisor) : period_(period) {
  convs_ = register_module("convs", nn::ModuleList());
  const int64_t widths[] = {1, width(32, channel_divisor), width(128, channel_divisor),
                            width(512, channel_divisor), width(1024, channel_divisor),
                            width(1024, channel_divisor)};
  for (int i = 0; i < 5; ++i) {
    const int64_t stride = i < 4 ? 3 : 1;
    convs_->push_back(nn::Conv2d(nn::Conv2dOptions(widths[i], widths[i + 1], {5, 1})
                                     .stride({stride, 1})
                                     .padding({2, 0})));
  }
  post_ = register_module("post", nn::Conv2d(nn::Conv2dOptions(widths[5], 1, {3, 1}).padding({1, 0})));
  to(torch::kFloat64);
}

std::pair<torch::Tensor, std::vector<torch::Tensor>> PeriodDiscriminatorImpl::forward(const torch::Tensor& audio) {
  auto x = pad_to_period(audio, period_);
  const int64_t b = x.size(0), c = x.size(1), t = x.size(2);
  x = x.view({b, c, t / period_, period_});
  std::vector<torch::Tensor> features;
  for (const auto& conv : *convs_) {
    x = leaky(conv->as<nn::Conv2d>()->forward(x));
    features.push_back(x);
  }
  x = post_(x);
  features.push_back(x);
  return {x.flatten(1), std::move(features)};
}

ScaleDiscriminatorImpl::ScaleDiscriminatorImpl(int64_t d) {
  convs_ = register_module("convs", nn::ModuleList());
  struct Spec { int64_t in, out, kernel, stride, groups, pad; };
  const Spec specs[] = {
      {1, width(128, d, 4), 15, 1, 1, 7},
      {width(128, d, 4), width(128, d, 4), 41, 2, 4, 20},
      {width(128, d, 4), width(256, d, 16), 41, 2, 16, 20},
      {width(256, d, 16), width(512, d, 16), 41, 4, 16, 20},
      {width(512, d, 16), width(1024, d, 16), 41, 4, 16, 20},
      {width(1024, d, 16), width(1024, d, 16), 41, 1, 16, 20},
      {width(1024, d, 16), width(1024, d, 16), 5, 1, 1, 2},
  };
  for (const auto& s : specs) {
    convs_->push_back(nn::Conv1d(
        nn::Conv1dOptions(s.in, s.out, s.kernel).stride(s.stride).groups(s.groups).padding(s.pad)));
  }
  post_ = register_module("post", nn::Conv1d(nn::Conv1dOptions(width(1024, d, 16), 1, 3).padding(1)));
  to(torch::kFloat64);
}

std::pair<torch::Tensor, std::vector<torch::Tensor>> ScaleDiscriminatorImpl::forward(const torch::Tensor& audio) {
  auto x = audio;
  std::vector<torch::Tensor> features;
  for (const auto& conv : *convs_) {
    x = leaky(conv->as<nn::Conv1d>()->forward(x));
    features.push_back(x);
  }
  x = post_(x);
  features.push_back(x);
  return {x.flatten(1), std::move(features)};
}

MultiDiscriminatorImpl::MultiDiscriminatorImpl(const DiscriminatorConfig& cfg) : cfg_(cfg) {
  if (cfg.periods.empty() || cfg.num_scales < 0 || cfg.channel_divisor <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid discriminator configuration");
  }
  scales_ = register_module("scales", nn::ModuleList());
  periods_ = register_module("periods", nn::ModuleList());
  for (int64_t i = 0; i < cfg.num_scales; ++i) scales_->push_back(ScaleDiscriminator(cfg.channel_divisor));
  for (int64_t p : cfg.periods) periods_->push_back(PeriodDiscriminator(p, cfg.channel_divisor));
}

DiscriminatorOutputs MultiDiscriminatorImpl::forward(const torch::Tensor& audio) {
  auto x = audio.dim() == 1 ? audio.view({1, 1, -1}) : audio;
  if (x.dim() != 3 || x.size(1) != 1) {
    throw Error(ErrorCode::kShapeMismatch, "discriminator input must be [B, 1, T]");
  }
  const int64_t smallest = *std::min_element(cfg_.periods.begin(), cfg_.periods.end());
  if (x.size(2) < smallest) {
    throw Error(ErrorCode::kInvalidArgument,
                "audio of " + std::to_string(x.size(2)) + " samples is shorter than period " +
                    std::to_string(smallest));
  }
  DiscriminatorOutputs out;
  auto scaled = x;
  for (size_t i = 0; i < scales_->size(); ++i) {
    if (i > 0) {
      scaled = F::avg_pool1d(scaled, F::AvgPool1dFuncOptions(4).stride(2).padding(2));
    }
    auto [score, feats] = scales_[i]->as<ScaleDiscriminator>()->forward(scaled);
    out.scores.push_back(score);
    out.features.push_back(std::move(feats));
  }
  for (const auto& d : *periods_) {
    auto [score, feats] = d->as<PeriodDiscriminator>()->forward(x);
    out.scores.push_back(score);
    out.features.push_back(std::move(feats));
  }
  return out;
}

}  // namespace itts::vocoder
