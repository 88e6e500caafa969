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
#include <string_view>

namespace ragmark {

// Maximal runs of a/e/i/o/u/y (case-insensitive), minimum 1.
std::size_t count_syllables(std::string_view word);

// Flesch-Kincaid grade level:
//   0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59
// Words are whitespace tokens containing at least one ASCII letter.
// Sentences are maximal runs of '.', '!', '?' (minimum 1).
double flesch_kincaid(std::string_view text);

}  // namespace ragmark
