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

#include <torch/torch.h>

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

namespace itts {

inline constexpr int64_t kCheckpointVersion = 1;

// Versioned checkpoint container (a torch serialization archive):
//   format   "itts-checkpoint"
//   version  kCheckpointVersion
//   kind     e.g. "acoustic", "vocoder"
//   meta     JSON text (configs, vocabulary, tables, counters)
//   modules/<name>, optimizers/<name>, tensors/<name>
class CheckpointWriter {
 public:
  CheckpointWriter(std::string kind, nlohmann::json meta);
  void add_module(const std::string& name, const torch::nn::Module& module);
  void add_optimizer(const std::string& name, const torch::optim::Optimizer& optimizer);
  void add_tensor(const std::string& name, const torch::Tensor& tensor);
  void save(const std::filesystem::path& path);

 private:
  torch::serialize::OutputArchive archive_;
  std::vector<std::string> tensors_;
};

class CheckpointReader {
 public:
  // Throws Error{kIo} if unreadable and Error{kFormat} on a foreign format,
  // unknown version or a kind other than expected_kind (when non-empty).
  explicit CheckpointReader(const std::filesystem::path& path, const std::string& expected_kind = "");

  const std::string& kind() const { return kind_; }
  const nlohmann::json& meta() const { return meta_; }
  void load_module(const std::string& name, torch::nn::Module& module);
  bool has_optimizer(const std::string& name);
  void load_optimizer(const std::string& name, torch::optim::Optimizer& optimizer);
  bool has_tensor(const std::string& name);
  torch::Tensor tensor(const std::string& name);

 private:
  torch::serialize::InputArchive archive_;
  std::string kind_;
  nlohmann::json meta_;
  std::filesystem::path path_;
};

}  // namespace itts
