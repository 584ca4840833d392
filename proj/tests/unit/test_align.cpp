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

#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "itts/align/aligner.hpp"
#include "itts/align/alignment.hpp"
#include "itts/error.hpp"

using namespace itts;
using namespace itts::align;

namespace {

// Every monotonic complete path for n tokens over m frames.
std::vector<std::vector<int64_t>> enumerate_paths(int64_t n, int64_t m) {
  std::vector<std::vector<int64_t>> out;
  std::vector<int64_t> path(static_cast<size_t>(m));
  std::function<void(int64_t, int64_t)> rec = [&](int64_t t, int64_t tok) {
    path[static_cast<size_t>(t)] = tok;
    if (t == m - 1) {
      if (tok == n - 1) out.push_back(path);
      return;
    }
    rec(t + 1, tok);
    if (tok + 1 < n) rec(t + 1, tok + 1);
  };
  rec(0, 0);
  return out;
}

double path_score(const torch::Tensor& log_probs, const std::vector<int64_t>& path) {
  auto a = log_probs.accessor<double, 2>();
  double s = 0.0;
  for (size_t t = 0; t < path.size(); ++t) s += a[path[t]][static_cast<int64_t>(t)];
  return s;
}

SoftAlignment random_soft(std::mt19937_64& rng, int64_t n, int64_t m) {
  torch::manual_seed(rng());
  return soft_alignment_from_affinity(3.0 * torch::randn({n, m}, torch::kFloat64));
}

}  // namespace

TEST_CASE("forward-sum and Viterbi agree with exhaustive enumeration") {
  std::mt19937_64 rng(42);
  int instances = 0;
  for (int64_t n = 1; n <= 4; ++n) {
    for (int64_t m = n; m <= 6; ++m) {
      const auto paths = enumerate_paths(n, m);
      for (int rep = 0; rep < 6; ++rep, ++instances) {
        const auto soft = random_soft(rng, n, m);
        double best = -std::numeric_limits<double>::infinity();
        double max_s = best;
        for (const auto& p : paths) max_s = std::max(max_s, path_score(soft.log_probs, p));
        double total = 0.0;
        for (const auto& p : paths) {
          const double s = path_score(soft.log_probs, p);
          total += std::exp(s - max_s);
          best = std::max(best, s);
        }
        const double expected = -(max_s + std::log(total));
        CHECK(forward_sum_loss(soft).item<double>() == doctest::Approx(expected).epsilon(1e-6));
        const auto hard = viterbi_hard(soft);
        CHECK(hard.is_valid());
        CHECK(hard.num_tokens == n);
        CHECK(std::abs(path_log_prob(soft, hard) - best) <= 1e-6);
      }
    }
  }
  CHECK(instances >= 100);
}

TEST_CASE("infeasible shapes are rejected") {
  const auto soft = soft_alignment_from_affinity(torch::zeros({4, 3}, torch::kFloat64));
  CHECK_THROWS_AS(forward_sum_loss(soft), Error);
  try {
    viterbi_hard(soft);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasibleAlignment);
  }
}

TEST_CASE("forward-sum gradient matches central differences") {
  torch::manual_seed(3);
  const auto affinity = torch::randn({3, 5}, torch::kFloat64);
  auto a = affinity.clone().requires_grad_(true);
  auto loss = forward_sum_loss(soft_alignment_from_affinity(a));
  loss.backward();
  const auto grad = a.grad();
  const double eps = 1e-4;
  for (int64_t i = 0; i < 3; ++i) {
    for (int64_t j = 0; j < 5; ++j) {
      auto plus = affinity.clone();
      auto minus = affinity.clone();
      plus[i][j] += eps;
      minus[i][j] -= eps;
      const double fd = (forward_sum_loss(soft_alignment_from_affinity(plus)).item<double>() -
                         forward_sum_loss(soft_alignment_from_affinity(minus)).item<double>()) /
                        (2 * eps);
      const double an = grad[i][j].item<double>();
      CHECK(std::abs(an - fd) <= 1e-3 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("binarization loss on the uniform 2x3 case is 3 ln 2") {
  const auto soft = SoftAlignment::from_probs(torch::full({2, 3}, 0.5, torch::kFloat64));
  const auto hard = viterbi_hard(soft);
  CHECK(binarization_loss(hard, soft).item<double>() == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(std::abs(binarization_loss(hard, soft).item<double>() - 3.0 * std::log(2.0)) <= 1e-9);
}

TEST_CASE("hard alignments are monotone and durations partition the frames") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    const int64_t n = 1 + static_cast<int64_t>(rng() % 8);
    const int64_t m = n + static_cast<int64_t>(rng() % 20);
    const auto hard = viterbi_hard(random_soft(rng, n, m));
    REQUIRE(hard.mel_length() == m);
    CHECK(hard.token_of_frame.front() == 0);
    CHECK(hard.token_of_frame.back() == n - 1);
    for (size_t t = 1; t < hard.token_of_frame.size(); ++t) {
      const auto step = hard.token_of_frame[t] - hard.token_of_frame[t - 1];
      CHECK((step == 0 || step == 1));
    }
    const auto d = durations_from_hard(hard);
    CHECK(static_cast<int64_t>(d.size()) == n);
    CHECK(d.total() == m);
    for (auto f : d.frames) CHECK(f >= 1);
    const auto dense = hard.dense();
    CHECK(dense.sum(0).eq(1.0).all().item<bool>());
  }
  HardAlignment bad{{0, 2, 2}, 3};
  CHECK_FALSE(bad.is_valid());
  HardAlignment backwards{{0, 1, 0, 1}, 2};
  CHECK_FALSE(backwards.is_valid());
}

TEST_CASE("soft alignment construction") {
  const auto text = torch::tensor({{0.0, 0.0}, {1.0, 1.0}}, torch::kFloat64);
  const auto mel = torch::tensor({{0.0, 1.0}, {2.0, 2.0}, {1.0, 1.0}}, torch::kFloat64);
  const auto aff = pairwise_affinity(text, mel);
  CHECK(aff[0][0].item<double>() == -1.0);
  CHECK(aff[1][1].item<double>() == -2.0);
  CHECK(aff[1][2].item<double>() == 0.0);
  const auto soft = soft_alignment(text, mel);
  CHECK(torch::allclose(soft.probs().sum(0), torch::ones({3}, torch::kFloat64)));
  CHECK_THROWS_AS(soft_alignment(text, torch::zeros({3, 3}, torch::kFloat64)), Error);
  CHECK_THROWS_AS(SoftAlignment::from_probs(torch::full({2, 2}, 0.4, torch::kFloat64)), Error);
}

TEST_CASE("alignment text dump round trip") {
  torch::manual_seed(1);
  const auto p = soft_alignment_from_affinity(torch::randn({3, 4}, torch::kFloat64)).probs();
  std::stringstream ss;
  write_alignment_text(ss, p, "soft");
  CHECK(ss.str().rfind("# soft 3 4", 0) == 0);
  const auto back = read_alignment_text(ss);
  CHECK(torch::equal(back, p));
}

TEST_CASE("aligner produces a column-stochastic alignment") {
  torch::manual_seed(0);
  AlignerConfig cfg;
  cfg.text_dim = 16;
  cfg.n_mels = 8;
  cfg.attention_dim = 8;
  Aligner aligner(cfg);
  aligner->to(torch::kFloat64);
  const auto soft = aligner->forward(torch::randn({4, 16}, torch::kFloat64), torch::randn({9, 8}, torch::kFloat64));
  CHECK(soft.text_length() == 4);
  CHECK(soft.mel_length() == 9);
  CHECK(torch::allclose(soft.probs().sum(0), torch::ones({9}, torch::kFloat64)));
}
