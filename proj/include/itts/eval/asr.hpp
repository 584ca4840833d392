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
#include <map>
#include <memory>
#include <set>
#include <string>

#include <json.hpp>

#include "itts/corpus/audio.hpp"

namespace itts::eval {

// Speech recognizer used for CER. Implementations must be safe to call from
// several threads or say otherwise through serial_only().
class AsrClient {
 public:
  virtual ~AsrClient() = default;
  virtual std::string transcribe(const corpus::AudioClip& audio, const std::string& language,
                                 const std::string& utterance_id) = 0;
  // Languages without recognizer support get no CER.
  virtual bool supports(const std::string& language) const = 0;
  virtual bool serial_only() const { return false; }
};

// Returns fixture transcripts keyed by utterance id.
class MockAsrClient final : public AsrClient {
 public:
  explicit MockAsrClient(std::map<std::string, std::string> transcripts, std::set<std::string> languages = {});
  // {"languages": [...optional...], "transcripts": {"<id>": "<text>", ...}}
  static MockAsrClient from_json_file(const std::filesystem::path& path);

  // Throws Error{kNotFound} for ids without a fixture transcript.
  std::string transcribe(const corpus::AudioClip& audio, const std::string& language,
                         const std::string& utterance_id) override;
  bool supports(const std::string& language) const override;

 private:
  std::map<std::string, std::string> transcripts_;
  std::set<std::string> languages_;  // empty = all
};

struct HttpAsrConfig {
  std::string endpoint;  // e.g. "http://127.0.0.1:8080/v1/transcribe"
  std::string api_key;   // sent as a bearer token when non-empty
  int timeout_seconds = 30;
  std::set<std::string> languages;  // empty = all
};

// POSTs {"language", "utterance_id", "sample_rate", "audio_wav_base64"} and
// reads {"transcript"} from the JSON reply. Transport failures and non-2xx
// replies raise Error{kExternal}.
class HttpAsrClient final : public AsrClient {
 public:
  explicit HttpAsrClient(HttpAsrConfig cfg);
  std::string transcribe(const corpus::AudioClip& audio, const std::string& language,
                         const std::string& utterance_id) override;
  bool supports(const std::string& language) const override;
  bool serial_only() const override { return true; }

 private:
  HttpAsrConfig cfg_;
  std::string base_, path_;
};

// {"type": "mock", "transcripts": "<fixture.json>"} or
// {"type": "http", "endpoint": ..., "api_key": ..., "timeout_seconds": ..., "languages": [...]}.
// A null config yields nullptr (no CER).
std::unique_ptr<AsrClient> make_asr_client(const nlohmann::json& cfg,
                                           const std::filesystem::path& base_dir = {});

}  // namespace itts::eval
