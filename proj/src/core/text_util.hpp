// Copyright 2026 the ragmark project
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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ragmark {

bool is_valid_utf8(std::string_view text);

// Converts \r\n and lone \r to \n.
std::string normalize_newlines(std::string_view text);

// Splits on ASCII whitespace; returned views point into `text`.
std::vector<std::string_view> split_whitespace(std::string_view text);

std::string to_lower_ascii(std::string_view token);

// Case-folds (ASCII) and strips leading/trailing ASCII punctuation.
// May return an empty string for tokens made of punctuation only.
std::string normalize_token(std::string_view token);

// Number of \n-separated lines; a trailing newline does not start a new line.
std::size_t count_lines(std::string_view text);

// Codepoint count (assumes valid UTF-8).
std::size_t utf8_length(std::string_view text);

bool is_identifier(std::string_view name);  // [A-Za-z0-9_.-]+

}  // namespace ragmark
