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

#include "itts/acoustic/losses.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <cmath>
#include <string>

#include "itts/error.hpp"

namespace itts::acoustic {

namespace nn = torch::nn;
namespace F = torch::nn::functional;

namespace {

void require_same_shape(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
  if (a.sizes() != b.sizes()) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + ": shapes differ");
  }
}

torch::Tensor gaussian_window(int64_t size, double sigma, torch::Dtype dtype) {
  auto x = torch::arange(size, torch::kFloat64) - static_cast<double>(size / 2);
  auto g = torch::exp(-x.square() / (2.0 * sigma * sigma));
  g = g / g.sum();
  return torch::outer(g, g).view({1, 1, size, size}).to(dtype);
}

}  // namespace

torch::Tensor spec_loss(const torch::Tensor& m, const torch::Tensor& m_hat) {
  require_same_shape(m, m_hat, "spec_loss");
  return (m - m_hat).square().mean();
}

torch::Tensor spec_loss(const corpus::MelSpectrogram& m, const corpus::MelSpectrogram& m_hat) {
  return spec_loss(m.frames, m_hat.frames);
}

std::pair<torch::Tensor, torch::Tensor> prosody_losses(const torch::Tensor& pitch_hat,
                                                       const torch::Tensor& pitch_target,
                                                       const torch::Tensor& log_duration_hat,
                                                       const align::DurationVector& duration_target) {
  if (pitch_hat.numel() != pitch_target.numel() ||
      log_duration_hat.numel() != static_cast<int64_t>(duration_target.size()) ||
      pitch_hat.numel() != log_duration_hat.numel()) {
    throw Error(ErrorCode::kShapeMismatch, "prosody prediction and target lengths differ");
  }
  std::vector<double> log_d(duration_target.size());
  for (size_t i = 0; i < log_d.size(); ++i) {
    log_d[i] = std::log(static_cast<double>(std::max<int64_t>(duration_target.frames[i], 1)));
  }
  auto dur_t = torch::tensor(log_d, log_duration_hat.options());
  auto pitch_loss = (pitch_hat.reshape({-1}) - pitch_target.reshape({-1}).to(pitch_hat.scalar_type()))
                        .square()
                        .mean();
  auto dur_loss = (log_duration_hat.reshape({-1}) - dur_t).square().mean();
  return {pitch_loss, dur_loss};
}

torch::Tensor ssim(const torch::Tensor& m, const torch::Tensor& m_hat) {
  require_same_shape(m, m_hat, "ssim");
  if (m.dim() != 2) throw Error(ErrorCode::kShapeMismatch, "ssim expects [T, n_mels] inputs");
  constexpr int64_t kWindow = 11;
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;

  auto lo = torch::minimum(m.min(), m_hat.min());
  auto hi = torch::maximum(m.max(), m_hat.max());
  auto range = hi - lo;
  if (range.item<double>() < 1e-12) range = torch::ones_like(range);
  auto x = ((m - lo) / range).unsqueeze(0).unsqueeze(0);
  auto y = ((m_hat - lo) / range).unsqueeze(0).unsqueeze(0);

  const auto window = gaussian_window(kWindow, 1.5, m.scalar_type()).to(m.device());
  auto blur = [&](const torch::Tensor& t) {
    return F::conv2d(t, window, F::Conv2dFuncOptions().padding(kWindow / 2));
  };
  auto mu_x = blur(x), mu_y = blur(y);
  auto var_x = blur(x * x) - mu_x.square();
  auto var_y = blur(y * y) - mu_y.square();
  auto cov = blur(x * y) - mu_x * mu_y;
  auto num = (2.0 * mu_x * mu_y + kC1) * (2.0 * cov + kC2);
  auto den = (mu_x.square() + mu_y.square() + kC1) * (var_x + var_y + kC2);
  return (num / den).mean();
}

torch::Tensor ssim_loss(const torch::Tensor& m, const torch::Tensor& m_hat) {
  return 1.0 - ssim(m, m_hat);
}

ConvFeatureExtractor::ConvFeatureExtractor(uint64_t seed) {
  net_ = nn::Sequential(nn::Conv2d(nn::Conv2dOptions(1, 8, 3).padding(1)), nn::ReLU(),
                        nn::MaxPool2d(nn::MaxPool2dOptions(2).ceil_mode(true)),
                        nn::Conv2d(nn::Conv2dOptions(8, 16, 3).padding(1)), nn::ReLU(),
                        nn::MaxPool2d(nn::MaxPool2dOptions(2).ceil_mode(true)));
  net_->to(torch::kFloat64);
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  torch::NoGradGuard no_grad;
  for (auto& p : net_->named_parameters()) {
    auto& t = p.value();
    if (p.key().find("weight") != std::string::npos) {
      const double fan_in = static_cast<double>(t.numel() / t.size(0));
      t.copy_(torch::randn(t.sizes(), gen, torch::kFloat64) * std::sqrt(2.0 / fan_in));
    } else {
      t.zero_();
    }
    t.set_requires_grad(false);
  }
  net_->eval();
}

torch::Tensor ConvFeatureExtractor::extract(const torch::Tensor& mel) {
  if (mel.dim() != 2) throw Error(ErrorCode::kShapeMismatch, "feature extractor expects [T, n_mels]");
  return net_->forward(mel.to(torch::kFloat64).unsqueeze(0).unsqueeze(0)).to(mel.scalar_type());
}

void ConvFeatureExtractor::load(const std::string& path) {
  torch::serialize::InputArchive archive;
  archive.load_from(path);
  net_->load(archive);
  for (auto& p : net_->parameters()) p.set_requires_grad(false);
}

void ConvFeatureExtractor::save(const std::string& path) const {
  torch::serialize::OutputArchive archive;
  net_->save(archive);
  archive.save_to(path);
}

torch::Tensor asr_consistency_loss(const torch::Tensor& m, const torch::Tensor& m_hat,
                                   FeatureExtractor& extractor) {
  require_same_shape(m, m_hat, "asr_consistency_loss");
  auto fa = extractor.extract(m);
  auto fb = extractor.extract(m_hat);
  require_same_shape(fa, fb, "asr_consistency_loss features");
  return (fa - fb).abs().mean();
}

LossBreakdown total_loss(const LossBreakdown& parts, const LossWeights& w) {
  const std::pair<const char*, double> named[] = {
      {"L_spec", parts.spec},     {"L_align", parts.align}, {"L_dur", parts.dur},
      {"L_pitch", parts.pitch},   {"L_binary", parts.binary}, {"L_ssim", parts.ssim},
      {"L_asr", parts.asr}};
  for (const auto& [name, value] : named) {
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kNonFinite, std::string(name) + " is not finite");
    }
  }
  LossBreakdown out = parts;
  out.acoustic = parts.spec + w.align * parts.align + w.dur * parts.dur + w.pitch * parts.pitch +
                 w.binary * parts.binary + w.ssim * parts.ssim + w.asr * parts.asr;
  return out;
}

torch::Tensor total_loss(const LossTerms& terms, const LossWeights& w) {
  torch::Tensor total = terms.spec;
  auto add = [&](const torch::Tensor& t, double weight) {
    if (t.defined() && weight != 0.0) total = total + weight * t;
  };
  add(terms.align, w.align);
  add(terms.dur, w.dur);
  add(terms.pitch, w.pitch);
  add(terms.binary, w.binary);
  add(terms.ssim, w.ssim);
  add(terms.asr, w.asr);
  return total;
}

LossBreakdown breakdown_of(const LossTerms& terms, const LossWeights& w) {
  auto value = [](const torch::Tensor& t) { return t.defined() ? t.item<double>() : 0.0; };
  LossBreakdown parts;
  parts.spec = value(terms.spec);
  parts.align = value(terms.align);
  parts.dur = value(terms.dur);
  parts.pitch = value(terms.pitch);
  parts.binary = value(terms.binary);
  parts.ssim = value(terms.ssim);
  parts.asr = value(terms.asr);
  return total_loss(parts, w);
}

}  // namespace itts::acoustic
