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

#include "core/sparse_vector.hpp"

#include <cmath>

#include "core/error.hpp"

namespace ragmark {

SparseVector SparseVector::from_entries(std::vector<SparseEntry> entries) {
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].weight == 0.0) {
      throw Error(ErrorCode::invalid_argument, "sparse entry weight must be non-zero");
    }
    if (i > 0 && entries[i].column <= entries[i - 1].column) {
      throw Error(ErrorCode::invalid_argument,
                  "sparse entry columns must be strictly increasing");
    }
    sum_sq += entries[i].weight * entries[i].weight;
  }
  SparseVector v;
  v.entries = std::move(entries);
  v.norm = std::sqrt(sum_sq);
  return v;
}

double dot(const SparseVector& u, const SparseVector& v) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < u.entries.size() && j < v.entries.size()) {
    std::uint32_t cu = u.entries[i].column;
    std::uint32_t cv = v.entries[j].column;
    if (cu == cv) {
      sum += u.entries[i].weight * v.entries[j].weight;
      ++i;
      ++j;
    } else if (cu < cv) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

double cosine_similarity(const SparseVector& u, const SparseVector& v) {
  if (u.norm == 0.0 || v.norm == 0.0) return 0.0;
  return dot(u, v) / (u.norm * v.norm);
}

}  // namespace ragmark
