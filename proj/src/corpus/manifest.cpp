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

#include "itts/corpus/manifest.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "itts/corpus/text.hpp"
#include "itts/error.hpp"

namespace itts::corpus {

using nlohmann::json;

Manifest read_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  Manifest manifest;
  std::unordered_set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "manifest line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kFormat, where + ": " + e.what());
    }
    Utterance u;
    try {
      u.id = j.at("id").get<std::string>();
      u.audio_path = j.at("audio_path").get<std::string>();
      u.raw_text = j.at("text").get<std::string>();
      u.speaker_id = j.at("speaker_id").get<std::string>();
      u.language = j.at("language").get<std::string>();
      u.duration = j.at("duration").get<double>();
      u.normalized_text = j.contains("normalized_text")
                              ? j["normalized_text"].get<std::string>()
                              : normalize_text(u.raw_text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormat, where + ": " + e.what());
    }
    if (!(u.duration > 0.0)) {
      throw Error(ErrorCode::kValidation, where + ": duration must be positive");
    }
    if (!seen.insert(u.id).second) {
      throw Error(ErrorCode::kDuplicate, where + ": duplicate id '" + u.id + "'");
    }
    if (!base_dir.empty() && u.audio_path.is_relative()) u.audio_path = base_dir / u.audio_path;
    manifest.utterances.push_back(std::move(u));
  }
  return manifest;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_manifest(in, path.parent_path());
}

void write_manifest(std::ostream& out, const Manifest& manifest, bool include_normalized) {
  for (const auto& u : manifest.utterances) {
    json j = {{"id", u.id},
              {"audio_path", u.audio_path.string()},
              {"text", u.raw_text},
              {"speaker_id", u.speaker_id},
              {"language", u.language},
              {"duration", u.duration}};
    if (include_normalized) j["normalized_text"] = u.normalized_text;
    out << j.dump() << '\n';
  }
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest,
                    bool include_normalized) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_manifest(out, manifest, include_normalized);
}

Manifest filter_utterances(const Manifest& manifest, double max_duration) {
  Manifest out;
  out.sample_rate = manifest.sample_rate;
  for (const auto& u : manifest.utterances) {
    if (u.duration <= max_duration) out.utterances.push_back(u);
  }
  return out;
}

}  // namespace itts::corpus
