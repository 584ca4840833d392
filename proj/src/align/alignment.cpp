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

#include "itts/align/alignment.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "itts/error.hpp"

namespace itts::align {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void require_feasible(int64_t text_len, int64_t mel_len) {
  if (text_len <= 0 || mel_len <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "alignment needs non-empty text and mel axes");
  }
  if (mel_len < text_len) {
    throw Error(ErrorCode::kInfeasibleAlignment,
                "cannot align " + std::to_string(text_len) + " tokens to " +
                    std::to_string(mel_len) + " frames");
  }
}

// Log-space forward variables: alpha[i][t] is the log mass of all partial
// paths that end on token i at frame t, including lp[i][t].
std::vector<double> forward_table(const double* lp, int64_t n, int64_t m) {
  std::vector<double> alpha(static_cast<size_t>(n * m), kNegInf);
  alpha[0] = lp[0];
  for (int64_t t = 1; t < m; ++t) {
    const int64_t hi = std::min(n - 1, t);
    const int64_t lo = std::max<int64_t>(0, n - (m - t));
    for (int64_t i = lo; i <= hi; ++i) {
      double acc = alpha[i * m + t - 1];
      if (i > 0) acc = log_add(acc, alpha[(i - 1) * m + t - 1]);
      alpha[i * m + t] = acc == kNegInf ? kNegInf : acc + lp[i * m + t];
    }
  }
  return alpha;
}

// beta[i][t]: log mass of completing from (i, t) to (n-1, m-1), excluding lp[i][t].
std::vector<double> backward_table(const double* lp, int64_t n, int64_t m) {
  std::vector<double> beta(static_cast<size_t>(n * m), kNegInf);
  beta[(n - 1) * m + m - 1] = 0.0;
  for (int64_t t = m - 2; t >= 0; --t) {
    for (int64_t i = 0; i < n; ++i) {
      double acc = beta[i * m + t + 1] == kNegInf ? kNegInf
                                                  : beta[i * m + t + 1] + lp[i * m + t + 1];
      if (i + 1 < n && beta[(i + 1) * m + t + 1] != kNegInf) {
        acc = log_add(acc, beta[(i + 1) * m + t + 1] + lp[(i + 1) * m + t + 1]);
      }
      beta[i * m + t] = acc;
    }
  }
  return beta;
}

class ForwardSumFunction : public torch::autograd::Function<ForwardSumFunction> {
 public:
  static torch::Tensor forward(torch::autograd::AutogradContext* ctx,
                               const torch::Tensor& log_probs) {
    auto lp = log_probs.detach().to(torch::kFloat64).contiguous();
    const int64_t n = lp.size(0), m = lp.size(1);
    const auto alpha = forward_table(lp.data_ptr<double>(), n, m);
    const double log_z = alpha[(n - 1) * m + m - 1];
    ctx->save_for_backward({log_probs});
    ctx->saved_data["log_z"] = log_z;
    return torch::tensor(-log_z, log_probs.options());
  }

  static torch::autograd::tensor_list backward(torch::autograd::AutogradContext* ctx,
                                               torch::autograd::tensor_list grad_outputs) {
    const auto saved = ctx->get_saved_variables();
    auto lp = saved[0].detach().to(torch::kFloat64).contiguous();
    const int64_t n = lp.size(0), m = lp.size(1);
    const double* p = lp.data_ptr<double>();
    const double log_z = ctx->saved_data["log_z"].toDouble();
    const auto alpha = forward_table(p, n, m);
    const auto beta = backward_table(p, n, m);
    auto grad = torch::zeros({n, m}, torch::kFloat64);
    double* g = grad.data_ptr<double>();
    for (int64_t k = 0; k < n * m; ++k) {
      if (alpha[k] == kNegInf || beta[k] == kNegInf) continue;
      // d(-log Z)/d lp = -occupancy
      g[k] = -std::exp(alpha[k] + beta[k] - log_z);
    }
    grad = grad.to(saved[0].scalar_type()) * grad_outputs[0];
    return {grad};
  }
};

}  // namespace

SoftAlignment SoftAlignment::from_probs(const torch::Tensor& probs) {
  if (probs.dim() != 2) throw Error(ErrorCode::kShapeMismatch, "soft alignment must be 2-D");
  if ((probs <= 0).any().item<bool>()) {
    throw Error(ErrorCode::kValidation, "soft alignment entries must be positive");
  }
  const auto col = probs.sum(0);
  if ((col - 1.0).abs().max().item<double>() > 1e-6) {
    throw Error(ErrorCode::kValidation, "soft alignment columns must sum to 1");
  }
  return {probs.log()};
}

bool HardAlignment::is_valid() const {
  if (token_of_frame.empty() || num_tokens <= 0) return false;
  if (token_of_frame.front() != 0 || token_of_frame.back() != num_tokens - 1) return false;
  for (size_t t = 1; t < token_of_frame.size(); ++t) {
    const int64_t step = token_of_frame[t] - token_of_frame[t - 1];
    if (step != 0 && step != 1) return false;
  }
  return true;
}

torch::Tensor HardAlignment::dense(torch::Dtype dtype) const {
  auto out = torch::zeros({num_tokens, mel_length()}, torch::kFloat64);
  auto acc = out.accessor<double, 2>();
  for (int64_t t = 0; t < mel_length(); ++t) acc[token_of_frame[t]][t] = 1.0;
  return out.to(dtype);
}

int64_t DurationVector::total() const {
  return std::accumulate(frames.begin(), frames.end(), int64_t{0});
}

torch::Tensor pairwise_affinity(const torch::Tensor& text_feats, const torch::Tensor& mel_feats) {
  if (text_feats.dim() != 2 || mel_feats.dim() != 2) {
    throw Error(ErrorCode::kShapeMismatch, "affinity inputs must be [T, d] matrices");
  }
  if (text_feats.size(0) == 0 || mel_feats.size(0) == 0) {
    throw Error(ErrorCode::kInvalidArgument, "affinity inputs must be non-empty");
  }
  if (text_feats.size(1) != mel_feats.size(1)) {
    throw Error(ErrorCode::kShapeMismatch,
                "feature width mismatch: text " + std::to_string(text_feats.size(1)) +
                    " vs mel " + std::to_string(mel_feats.size(1)));
  }
  auto diff = text_feats.unsqueeze(1) - mel_feats.unsqueeze(0);  // [Tt, Tm, d]
  return -diff.square().sum(-1);
}

SoftAlignment soft_alignment_from_affinity(const torch::Tensor& affinity) {
  if (affinity.dim() != 2 || affinity.size(0) == 0 || affinity.size(1) == 0) {
    throw Error(ErrorCode::kShapeMismatch, "affinity must be a non-empty 2-D matrix");
  }
  return {torch::log_softmax(affinity, /*dim=*/0)};
}

SoftAlignment soft_alignment(const torch::Tensor& text_feats, const torch::Tensor& mel_feats) {
  return soft_alignment_from_affinity(pairwise_affinity(text_feats, mel_feats));
}

torch::Tensor forward_sum_loss(const SoftAlignment& soft) {
  require_feasible(soft.text_length(), soft.mel_length());
  return ForwardSumFunction::apply(soft.log_probs);
}

HardAlignment viterbi_hard(const SoftAlignment& soft) {
  const int64_t n = soft.text_length(), m = soft.mel_length();
  require_feasible(n, m);
  auto lp = soft.log_probs.detach().to(torch::kFloat64).contiguous();
  const double* p = lp.data_ptr<double>();
  std::vector<double> score(static_cast<size_t>(n * m), kNegInf);
  std::vector<uint8_t> advanced(static_cast<size_t>(n * m), 0);
  score[0] = p[0];
  for (int64_t t = 1; t < m; ++t) {
    const int64_t hi = std::min(n - 1, t);
    const int64_t lo = std::max<int64_t>(0, n - (m - t));
    for (int64_t i = lo; i <= hi; ++i) {
      const double stay = score[i * m + t - 1];
      const double move = i > 0 ? score[(i - 1) * m + t - 1] : kNegInf;
      const bool take_move = move > stay;
      score[i * m + t] = (take_move ? move : stay) + p[i * m + t];
      advanced[i * m + t] = take_move ? 1 : 0;
    }
  }
  HardAlignment hard;
  hard.num_tokens = n;
  hard.token_of_frame.resize(static_cast<size_t>(m));
  int64_t i = n - 1;
  for (int64_t t = m - 1; t >= 0; --t) {
    hard.token_of_frame[t] = i;
    if (t > 0 && advanced[i * m + t]) --i;
  }
  return hard;
}

double path_log_prob(const SoftAlignment& soft, const HardAlignment& hard) {
  auto lp = soft.log_probs.detach().to(torch::kFloat64).contiguous();
  auto acc = lp.accessor<double, 2>();
  double total = 0.0;
  for (int64_t t = 0; t < hard.mel_length(); ++t) total += acc[hard.token_of_frame[t]][t];
  return total;
}

torch::Tensor binarization_loss(const HardAlignment& hard, const SoftAlignment& soft) {
  if (hard.num_tokens != soft.text_length() || hard.mel_length() != soft.mel_length()) {
    throw Error(ErrorCode::kShapeMismatch,
                "hard alignment " + std::to_string(hard.num_tokens) + "x" +
                    std::to_string(hard.mel_length()) + " vs soft " +
                    std::to_string(soft.text_length()) + "x" +
                    std::to_string(soft.mel_length()));
  }
  const auto mask = hard.dense(soft.log_probs.scalar_type());
  return -(mask * soft.log_probs).sum();
}

DurationVector durations_from_hard(const HardAlignment& hard) {
  DurationVector d;
  d.frames.assign(static_cast<size_t>(hard.num_tokens), 0);
  for (int64_t tok : hard.token_of_frame) ++d.frames[static_cast<size_t>(tok)];
  return d;
}

void write_alignment_text(std::ostream& out, const torch::Tensor& matrix, std::string_view kind) {
  auto m = matrix.detach().to(torch::kFloat64).contiguous();
  if (m.dim() != 2) throw Error(ErrorCode::kShapeMismatch, "expected a 2-D matrix");
  out << "# " << kind << ' ' << m.size(0) << ' ' << m.size(1) << '\n';
  auto acc = m.accessor<double, 2>();
  char buf[32];
  for (int64_t i = 0; i < m.size(0); ++i) {
    for (int64_t j = 0; j < m.size(1); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", acc[i][j]);
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  }
}

torch::Tensor read_alignment_text(std::istream& in) {
  std::string hash, kind;
  int64_t rows = 0, cols = 0;
  if (!(in >> hash >> kind >> rows >> cols) || hash != "#" || rows < 0 || cols < 0) {
    throw Error(ErrorCode::kFormat, "bad alignment header");
  }
  auto out = torch::empty({rows, cols}, torch::kFloat64);
  auto acc = out.accessor<double, 2>();
  for (int64_t i = 0; i < rows; ++i) {
    for (int64_t j = 0; j < cols; ++j) {
      std::string tok;
      if (!(in >> tok)) throw Error(ErrorCode::kFormat, "truncated alignment matrix");
      acc[i][j] = std::stod(tok);
    }
  }
  return out;
}

}  // namespace itts::align
