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

#include "itts/mos/server.hpp"

#include <fstream>
#include <iterator>

#include <httplib.h>

namespace itts::mos {

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, http_status(code),
            {{"error", {{"code", std::string(error_code_name(code))}, {"message", message}}}});
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const std::exception& e) {
      send_error(res, ErrorCode::kExternal, e.what());
    }
  };
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kValidation:
    case ErrorCode::kOutOfRange:
    case ErrorCode::kFormat:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kDuplicate:
      return 409;
    default:
      return 500;
  }
}

MosServer::MosServer(MosStore& store) : store_(store), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;

  s.Get(R"(/campaigns/([^/]+)/next)", guarded([this](const httplib::Request& req, httplib::Response& res) {
          const std::string campaign = req.matches[1];
          if (!req.has_param("rater") || req.get_param_value("rater").empty()) {
            throw Error(ErrorCode::kValidation, "query parameter 'rater' is required");
          }
          send_json(res, 200, next_payload(campaign, store_.next_sample(campaign, req.get_param_value("rater"))));
        }));

  s.Get(R"(/samples/([^/]+)/audio)", guarded([this](const httplib::Request& req, httplib::Response& res) {
          const auto sample = store_.sample(req.matches[1]);
          if (!sample) throw Error(ErrorCode::kNotFound, "unknown sample '" + std::string(req.matches[1]) + "'");
          std::ifstream in(sample->audio_path, std::ios::binary);
          if (!in) throw Error(ErrorCode::kIo, "audio for sample '" + sample->sample_id + "' is unavailable");
          std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
          res.status = 200;
          res.set_content(std::move(bytes), "audio/wav");
        }));

  s.Post(R"(/campaigns/([^/]+)/ratings)", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const std::string campaign = req.matches[1];
           nlohmann::json body;
           try {
             body = nlohmann::json::parse(req.body);
           } catch (const nlohmann::json::exception&) {
             throw Error(ErrorCode::kValidation, "request body is not JSON");
           }
           if (!body.is_object() || !body.contains("rater") || !body["rater"].is_string() ||
               !body.contains("sample") || !body["sample"].is_string()) {
             throw Error(ErrorCode::kValidation, "fields 'rater' and 'sample' must be strings");
           }
           if (!body.contains("score") || !body["score"].is_number_integer()) {
             throw Error(ErrorCode::kValidation, "field 'score' must be an integer from 1 to 5");
           }
           const auto rater = body["rater"].get<std::string>();
           const auto score = body["score"].get<int64_t>();
           if (score < kMinScore || score > kMaxScore) {
             throw Error(ErrorCode::kValidation, "score must be an integer from 1 to 5");
           }
           const auto rec = store_.submit_rating(campaign, rater, body["sample"].get<std::string>(),
                                                 static_cast<int>(score));
           const auto p = store_.progress(campaign, rater);
           send_json(res, 201,
                     {{"rating",
                       {{"rater", rec.rater_id}, {"sample", rec.sample_id}, {"score", rec.score},
                        {"timestamp", rec.timestamp}}},
                      {"progress", {{"rated", p.rated}, {"total", p.total}}}});
         }));

  s.Get(R"(/campaigns/([^/]+)/report)", guarded([this](const httplib::Request& req, httplib::Response& res) {
          send_json(res, 200, store_.report(req.matches[1]).to_json());
        }));

  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(nlohmann::json{{"error", {{"code", "not-found"}, {"message", "no such route"}}}}.dump(),
                      "application/json");
    }
  });
}

MosServer::~MosServer() { stop(); }

bool MosServer::listen(const std::string& host, int port) { return server_->listen(host, port); }

int MosServer::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool MosServer::listen_after_bind() { return server_->listen_after_bind(); }

void MosServer::stop() {
  if (server_->is_running()) server_->stop();
}

void MosServer::wait_until_ready() { server_->wait_until_ready(); }

}  // namespace itts::mos
