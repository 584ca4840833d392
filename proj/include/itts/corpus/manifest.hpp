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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace itts::corpus {

struct Utterance {
  std::string id;
  std::filesystem::path audio_path;
  std::string raw_text;
  // Filled by preprocessing; defaults to normalize_text(raw_text) on read.
  std::string normalized_text;
  std::string speaker_id;
  std::string language;
  double duration = 0.0;  // seconds
};

struct Manifest {
  std::vector<Utterance> utterances;
  int sample_rate = 22050;

  bool empty() const { return utterances.empty(); }
  size_t size() const { return utterances.size(); }
};

// JSON-lines manifest. Required keys per line:
//   id, audio_path, text, speaker_id, language, duration
// An optional "normalized_text" key is written by prepare-data and read back.
// Relative audio paths are resolved against `base_dir` when given.
// Throws Error{kFormat} for malformed lines, Error{kDuplicate} for repeated
// ids and Error{kValidation} for non-positive durations.
Manifest read_manifest(std::istream& in, const std::filesystem::path& base_dir = {});
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, const Manifest& manifest,
                    bool include_normalized = false);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest,
                    bool include_normalized = false);

// Keeps utterances with duration <= max_duration (inclusive), in order.
Manifest filter_utterances(const Manifest& manifest, double max_duration);

}  // namespace itts::corpus
