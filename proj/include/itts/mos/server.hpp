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

#include <memory>
#include <string>

#include "itts/error.hpp"
#include "itts/mos/store.hpp"

namespace httplib {
class Server;
}

namespace itts::mos {

// HTTP status for an error code: 400 validation, 404 not found,
// 409 duplicate, 500 otherwise.
int http_status(ErrorCode code);

// JSON API over a MosStore (see docs/mos_api.json):
//   GET  /campaigns/{id}/next?rater=R
//   GET  /samples/{id}/audio
//   POST /campaigns/{id}/ratings   {"rater", "sample", "score"}
//   GET  /campaigns/{id}/report
// Errors are {"error": {"code", "message"}}.
class MosServer {
 public:
  explicit MosServer(MosStore& store);
  ~MosServer();

  // Blocks until stop().
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it (or -1); serve with
  // listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready();

 private:
  MosStore& store_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace itts::mos
