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

#include <cstdint>
#include <vector>

namespace ragmark {

struct SparseEntry {
  std::uint32_t column = 0;
  double weight = 0.0;
};

// Columns strictly increasing, weights non-zero, norm cached.
struct SparseVector {
  std::vector<SparseEntry> entries;
  double norm = 0.0;

  static SparseVector from_entries(std::vector<SparseEntry> entries);

  bool empty() const { return entries.empty(); }
};

double dot(const SparseVector& u, const SparseVector& v);

// (u . v) / (|u| |v|); 0.0 when either norm is zero.
double cosine_similarity(const SparseVector& u, const SparseVector& v);

}  // namespace ragmark
