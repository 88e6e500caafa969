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

#include "core/readability.hpp"

#include "core/error.hpp"
#include "core/text_util.hpp"

namespace ragmark {

namespace {

inline bool is_vowel(char c) {
  if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

inline bool is_ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

}  // namespace

std::size_t count_syllables(std::string_view word) {
  std::size_t groups = 0;
  bool in_group = false;
  for (char c : word) {
    bool vowel = is_vowel(c);
    if (vowel && !in_group) ++groups;
    in_group = vowel;
  }
  return groups == 0 ? 1 : groups;
}

double flesch_kincaid(std::string_view text) {
  std::size_t words = 0;
  std::size_t syllables = 0;
  for (std::string_view token : split_whitespace(text)) {
    bool has_alpha = false;
    for (char c : token) {
      if (is_ascii_alpha(c)) {
        has_alpha = true;
        break;
      }
    }
    if (!has_alpha) continue;
    ++words;
    syllables += count_syllables(token);
  }
  if (words == 0) {
    throw Error(ErrorCode::invalid_argument,
                "flesch_kincaid requires at least one word");
  }

  std::size_t sentences = 0;
  bool in_terminator_run = false;
  for (char c : text) {
    bool terminator = c == '.' || c == '!' || c == '?';
    if (terminator && !in_terminator_run) ++sentences;
    in_terminator_run = terminator;
  }
  if (sentences == 0) sentences = 1;

  return 0.39 * (static_cast<double>(words) / static_cast<double>(sentences)) +
         11.8 * (static_cast<double>(syllables) / static_cast<double>(words)) -
         15.59;
}

}  // namespace ragmark
