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

#include <string>
#include <string_view>

namespace itts::corpus {

// Replaces ';' and ':' with ',', drops '(' and ')', collapses whitespace runs
// to a single space and trims both ends. Idempotent.
std::string normalize_text(std::string_view raw);

// Unicode canonical composition (NFC).
std::string nfc(std::string_view text);

// UTF-8 <-> code points. Invalid sequences throw Error{kFormat}.
std::u32string to_code_points(std::string_view utf8);
std::string to_utf8(std::u32string_view code_points);
std::string to_utf8(char32_t code_point);

}  // namespace itts::corpus
