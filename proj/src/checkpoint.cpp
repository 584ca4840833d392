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

#include "itts/checkpoint.hpp"

#include "itts/error.hpp"

namespace itts {

namespace {
constexpr const char* kFormatTag = "itts-checkpoint";
}

CheckpointWriter::CheckpointWriter(std::string kind, nlohmann::json meta) {
  archive_.write("format", c10::IValue(std::string(kFormatTag)));
  archive_.write("version", c10::IValue(kCheckpointVersion));
  archive_.write("kind", c10::IValue(std::move(kind)));
  archive_.write("meta", c10::IValue(meta.dump()));
}

void CheckpointWriter::add_module(const std::string& name, const torch::nn::Module& module) {
  torch::serialize::OutputArchive sub;
  module.save(sub);
  archive_.write("modules/" + name, sub);
}

void CheckpointWriter::add_optimizer(const std::string& name, const torch::optim::Optimizer& optimizer) {
  torch::serialize::OutputArchive sub;
  optimizer.save(sub);
  archive_.write("optimizers/" + name, sub);
}

void CheckpointWriter::add_tensor(const std::string& name, const torch::Tensor& tensor) {
  archive_.write("tensors/" + name, tensor.detach().clone(), /*is_buffer=*/true);
}

void CheckpointWriter::save(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write then rename so readers never observe a partial file.
  const auto tmp = path.string() + ".tmp";
  try {
    archive_.save_to(tmp);
  } catch (const c10::Error& e) {
    throw Error(ErrorCode::kIo, "cannot write checkpoint " + path.string() + ": " + e.what_without_backtrace());
  }
  std::filesystem::rename(tmp, path);
}

CheckpointReader::CheckpointReader(const std::filesystem::path& path, const std::string& expected_kind)
    : path_(path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::kIo, "no checkpoint at " + path.string());
  try {
    archive_.load_from(path.string());
  } catch (const c10::Error& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": not a checkpoint archive");
  }
  c10::IValue v;
  if (!archive_.try_read("format", v) || !v.isString() || v.toStringRef() != kFormatTag) {
    throw Error(ErrorCode::kFormat, path.string() + ": missing itts checkpoint tag");
  }
  if (!archive_.try_read("version", v) || !v.isInt() || v.toInt() != kCheckpointVersion) {
    throw Error(ErrorCode::kFormat, path.string() + ": unsupported checkpoint version");
  }
  archive_.read("kind", v);
  kind_ = v.toStringRef();
  if (!expected_kind.empty() && kind_ != expected_kind) {
    throw Error(ErrorCode::kFormat,
                path.string() + ": expected a " + expected_kind + " checkpoint, found " + kind_);
  }
  archive_.read("meta", v);
  meta_ = nlohmann::json::parse(v.toStringRef());
}

void CheckpointReader::load_module(const std::string& name, torch::nn::Module& module) {
  torch::serialize::InputArchive sub;
  if (!archive_.try_read("modules/" + name, sub)) {
    throw Error(ErrorCode::kFormat, path_.string() + ": no module '" + name + "'");
  }
  try {
    module.load(sub);
  } catch (const c10::Error& e) {
    throw Error(ErrorCode::kFormat, path_.string() + ": module '" + name +
                                        "' does not match its configuration: " + e.what_without_backtrace());
  }
}

bool CheckpointReader::has_optimizer(const std::string& name) {
  torch::serialize::InputArchive sub;
  return archive_.try_read("optimizers/" + name, sub);
}

void CheckpointReader::load_optimizer(const std::string& name, torch::optim::Optimizer& optimizer) {
  torch::serialize::InputArchive sub;
  if (!archive_.try_read("optimizers/" + name, sub)) {
    throw Error(ErrorCode::kFormat, path_.string() + ": no optimizer state '" + name + "'");
  }
  optimizer.load(sub);
}

bool CheckpointReader::has_tensor(const std::string& name) {
  torch::Tensor t;
  return archive_.try_read("tensors/" + name, t, /*is_buffer=*/true);
}

torch::Tensor CheckpointReader::tensor(const std::string& name) {
  torch::Tensor t;
  if (!archive_.try_read("tensors/" + name, t, /*is_buffer=*/true)) {
    throw Error(ErrorCode::kFormat, path_.string() + ": no tensor '" + name + "'");
  }
  return t;
}

}  // namespace itts
