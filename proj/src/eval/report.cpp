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

#include "itts/eval/report.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include "itts/error.hpp"
#include "itts/eval/metrics.hpp"

namespace itts::eval {

namespace {

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

std::optional<double> parse_cell(const std::string& s) {
  if (s.empty()) return std::nullopt;
  size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

struct Accumulator {
  double sum = 0.0;
  int64_t n = 0;
  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  std::optional<double> mean() const {
    return n > 0 ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
  }
};

}  // namespace

nlohmann::json MetricReport::to_json() const {
  nlohmann::json rows_j = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_j.push_back({{"language", r.language},
                      {"speaker", r.speaker},
                      {"system", r.system},
                      {"MCD", opt_json(r.mcd)},
                      {"F0", opt_json(r.f0_rmse)},
                      {"CER", opt_json(r.cer)},
                      {"num_utterances", r.num_utterances}});
  }
  nlohmann::json utts = nlohmann::json::array();
  for (const auto& u : utterances) {
    utts.push_back({{"id", u.id},
                    {"language", u.language},
                    {"speaker", u.speaker},
                    {"MCD", opt_json(u.mcd)},
                    {"F0", opt_json(u.f0_rmse)},
                    {"CER", opt_json(u.cer)},
                    {"errors", u.errors}});
  }
  return {{"rows", rows_j}, {"utterances", utts}, {"metadata", metadata}};
}

MetricReport MetricReport::from_json(const nlohmann::json& j) {
  MetricReport report;
  try {
    for (const auto& r : j.at("rows")) {
      report.rows.push_back({r.at("language").get<std::string>(), r.at("speaker").get<std::string>(),
                             r.at("system").get<std::string>(), opt_from(r, "MCD"), opt_from(r, "F0"),
                             opt_from(r, "CER"), r.value("num_utterances", int64_t{0})});
    }
    for (const auto& u : j.value("utterances", nlohmann::json::array())) {
      report.utterances.push_back({u.at("id").get<std::string>(), u.value("language", std::string{}),
                                   u.value("speaker", std::string{}), opt_from(u, "MCD"), opt_from(u, "F0"),
                                   opt_from(u, "CER"),
                                   u.value("errors", std::vector<std::string>{})});
    }
    report.metadata = j.value("metadata", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed metric report: ") + e.what());
  }
  return report;
}

void MetricReport::write_csv(std::ostream& out) const {
  out << "language,speaker,system,MCD,F0,CER\n";
  for (const auto& r : rows) {
    out << quote_csv(r.language) << ',' << quote_csv(r.speaker) << ',' << quote_csv(r.system) << ','
        << cell(r.mcd) << ',' << cell(r.f0_rmse) << ',' << cell(r.cer) << '\n';
  }
}

std::vector<MetricRow> MetricReport::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "language,speaker,system,MCD,F0,CER") {
    throw Error(ErrorCode::kFormat, "metric CSV header must be 'language,speaker,system,MCD,F0,CER'");
  }
  std::vector<MetricRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 6) throw Error(ErrorCode::kFormat, "metric CSV row needs 6 fields: " + line);
    try {
      rows.push_back({f[0], f[1], f[2], parse_cell(f[3]), parse_cell(f[4]), parse_cell(f[5]), 0});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kFormat, "non-numeric metric in row: " + line);
    }
  }
  return rows;
}

std::vector<MetricRow> aggregate(const std::vector<UtteranceMetrics>& utterances, const std::string& system) {
  struct Group {
    Accumulator mcd, f0, cer;
    int64_t n = 0;
  };
  std::map<std::pair<std::string, std::string>, Group> groups;
  for (const auto& u : utterances) {
    auto& g = groups[{u.language, u.speaker}];
    g.mcd.add(u.mcd);
    g.f0.add(u.f0_rmse);
    g.cer.add(u.cer);
    ++g.n;
  }
  std::vector<MetricRow> rows;
  for (const auto& [key, g] : groups) {
    rows.push_back({key.first, key.second, system, g.mcd.mean(), g.f0.mean(), g.cer.mean(), g.n});
  }
  return rows;
}

MetricReport evaluate_testset(const corpus::Manifest& manifest, const SynthesisFn& synth, AsrClient* asr,
                              const EvaluationOptions& options) {
  MetricReport report;
  const auto& cfg = options.mel_config;
  for (const auto& u : manifest.utterances) {
    UtteranceMetrics m{u.id, u.language, u.speaker_id, std::nullopt, std::nullopt, std::nullopt, {}};
    auto record = [&](const char* what, auto&& fn) {
      try {
        fn();
      } catch (const std::exception& e) {
        m.errors.push_back(std::string(what) + ": " + e.what());
      }
    };
    corpus::AudioClip ref, syn;
    bool ok = true;
    record("reference", [&] {
      ref = corpus::read_wav(u.audio_path);
      if (ref.sample_rate != cfg.sample_rate) ref = corpus::resample(ref, cfg.sample_rate);
    });
    record("synthesis", [&] {
      syn = synth(u);
      if (syn.sample_rate != cfg.sample_rate) syn = corpus::resample(syn, cfg.sample_rate);
    });
    ok = m.errors.empty();
    if (ok) {
      record("MCD", [&] { m.mcd = mcd(ref, syn, cfg, options.fast_dtw); });
      record("F0", [&] { m.f0_rmse = log_f0_rmse(ref, syn, options.fast_dtw); });
      if (asr != nullptr && asr->supports(u.language)) {
        record("CER", [&] {
          const auto& reference = u.normalized_text.empty() ? u.raw_text : u.normalized_text;
          m.cer = cer(reference, asr->transcribe(syn, u.language, u.id));
        });
      }
    }
    report.utterances.push_back(std::move(m));
  }
  report.rows = aggregate(report.utterances, options.system);
  report.metadata = {{"system", options.system},
                     {"num_utterances", manifest.size()},
                     {"dtw", options.fast_dtw ? "fast" : "exact"},
                     {"mcd_coefficients", kNumCepstra},
                     {"f0_log", "natural"},
                     {"asr", asr != nullptr}};
  return report;
}

}  // namespace itts::eval
