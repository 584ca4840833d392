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

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "itts/corpus/audio.hpp"
#include "itts/corpus/manifest.hpp"
#include "itts/corpus/mel.hpp"
#include "itts/eval/asr.hpp"

namespace itts::eval {

struct UtteranceMetrics {
  std::string id;
  std::string language;
  std::string speaker;
  std::optional<double> mcd;
  std::optional<double> f0_rmse;
  std::optional<double> cer;
  std::vector<std::string> errors;  // failures recorded per metric
};

// One (language, speaker, system) line; metrics are means over the
// utterances for which they were defined.
struct MetricRow {
  std::string language;
  std::string speaker;
  std::string system;
  std::optional<double> mcd;
  std::optional<double> f0_rmse;
  std::optional<double> cer;
  int64_t num_utterances = 0;

  bool operator==(const MetricRow&) const = default;
};

struct MetricReport {
  std::vector<MetricRow> rows;
  std::vector<UtteranceMetrics> utterances;
  nlohmann::json metadata = nlohmann::json::object();

  // {"rows": [{"language", "speaker", "system", "MCD", "F0", "CER",
  //   "num_utterances"}], "utterances": [...], "metadata": {...}}
  // Missing metrics are null.
  nlohmann::json to_json() const;
  static MetricReport from_json(const nlohmann::json& j);

  // Columns language,speaker,system,MCD,F0,CER; an empty cell is a missing
  // metric. Values use 17 significant digits.
  void write_csv(std::ostream& out) const;
  static std::vector<MetricRow> read_csv(std::istream& in);
};

// Groups utterance results into rows sorted by (language, speaker).
std::vector<MetricRow> aggregate(const std::vector<UtteranceMetrics>& utterances, const std::string& system);

using SynthesisFn = std::function<corpus::AudioClip(const corpus::Utterance&)>;

struct EvaluationOptions {
  std::string system = "system";
  corpus::MelConfig mel_config;
  bool fast_dtw = false;
};

// Synthesizes every utterance, compares it against the reference recording
// and aggregates. Failures of single utterances or metrics are recorded in
// the per-utterance results; CER is skipped without an ASR client or for
// languages it does not support.
MetricReport evaluate_testset(const corpus::Manifest& manifest, const SynthesisFn& synth, AsrClient* asr,
                              const EvaluationOptions& options = {});

}  // namespace itts::eval
