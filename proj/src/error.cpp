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

#include "itts/error.hpp"

namespace itts {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kUnsupportedRate: return "unsupported-rate";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kInfeasibleAlignment: return "infeasible-alignment";
    case ErrorCode::kUnmappedGrapheme: return "unmapped-grapheme";
    case ErrorCode::kUndefinedMetric: return "undefined-metric";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kExternal: return "external";
  }
  return "unknown";
}

}  // namespace itts
