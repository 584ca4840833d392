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

#include "itts/eval/asr.hpp"

#include <fstream>

#include <httplib.h>

#include "itts/error.hpp"

namespace itts::eval {

MockAsrClient::MockAsrClient(std::map<std::string, std::string> transcripts, std::set<std::string> languages)
    : transcripts_(std::move(transcripts)), languages_(std::move(languages)) {}

MockAsrClient MockAsrClient::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    return MockAsrClient(j.at("transcripts").get<std::map<std::string, std::string>>(),
                         j.value("languages", std::set<std::string>{}));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

std::string MockAsrClient::transcribe(const corpus::AudioClip&, const std::string&,
                                      const std::string& utterance_id) {
  auto it = transcripts_.find(utterance_id);
  if (it == transcripts_.end()) {
    throw Error(ErrorCode::kNotFound, "no fixture transcript for '" + utterance_id + "'");
  }
  return it->second;
}

bool MockAsrClient::supports(const std::string& language) const {
  return languages_.empty() || languages_.count(language) > 0;
}

HttpAsrClient::HttpAsrClient(HttpAsrConfig cfg) : cfg_(std::move(cfg)) {
  const auto scheme = cfg_.endpoint.find("://");
  if (scheme == std::string::npos || cfg_.endpoint.compare(0, scheme, "http") != 0) {
    throw Error(ErrorCode::kInvalidArgument, "ASR endpoint must be an http:// URL");
  }
  const auto slash = cfg_.endpoint.find('/', scheme + 3);
  base_ = cfg_.endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : cfg_.endpoint.substr(slash);
}

std::string HttpAsrClient::transcribe(const corpus::AudioClip& audio, const std::string& language,
                                      const std::string& utterance_id) {
  httplib::Client client(base_);
  client.set_connection_timeout(cfg_.timeout_seconds);
  client.set_read_timeout(cfg_.timeout_seconds);
  if (!cfg_.api_key.empty()) client.set_bearer_token_auth(cfg_.api_key);
  const nlohmann::json body{{"language", language},
                            {"utterance_id", utterance_id},
                            {"sample_rate", audio.sample_rate},
                            {"audio_wav_base64", httplib::detail::base64_encode(corpus::encode_wav(audio))}};
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kExternal, "ASR request failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::kExternal, "ASR service replied " + std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body).at("transcript").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kExternal, std::string("malformed ASR reply: ") + e.what());
  }
}

bool HttpAsrClient::supports(const std::string& language) const {
  return cfg_.languages.empty() || cfg_.languages.count(language) > 0;
}

std::unique_ptr<AsrClient> make_asr_client(const nlohmann::json& cfg, const std::filesystem::path& base_dir) {
  if (cfg.is_null()) return nullptr;
  const auto type = cfg.value("type", std::string{});
  if (type == "mock") {
    std::filesystem::path p = cfg.at("transcripts").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return std::make_unique<MockAsrClient>(MockAsrClient::from_json_file(p));
  }
  if (type == "http") {
    HttpAsrConfig h;
    h.endpoint = cfg.at("endpoint").get<std::string>();
    h.api_key = cfg.value("api_key", std::string{});
    h.timeout_seconds = cfg.value("timeout_seconds", h.timeout_seconds);
    h.languages = cfg.value("languages", std::set<std::string>{});
    return std::make_unique<HttpAsrClient>(h);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown ASR client type '" + type + "'");
}

}  // namespace itts::eval
