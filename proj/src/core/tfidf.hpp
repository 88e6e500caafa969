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
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "core/corpus.hpp"
#include "core/sparse_vector.hpp"

namespace ragmark {

// Vocabulary in lexicographic column order with smoothed inverse document
// frequencies: idf(t) = ln((1 + M) / (1 + df(t))) + 1.
struct TfIdfModel {
  std::vector<std::string> terms;
  std::unordered_map<std::string, std::uint32_t> vocabulary;
  std::vector<double> idf;
  std::size_t num_documents = 0;
};

TfIdfModel fit_tfidf(const std::vector<Chunk>& chunks);

// tf * idf, L2-normalized. Out-of-vocabulary terms are ignored; an all-OOV
// text embeds to the zero vector.
SparseVector embed_text(const TfIdfModel& model, std::string_view text);

// Texts joined with single newlines, in the given order.
std::string assemble_context(const std::vector<std::string>& texts);

struct RetrievalResult {
  std::vector<std::uint32_t> chunk_ids;  // score-descending, ties by lower id
  std::vector<double> scores;
  std::string context;
};

// Immutable after build/load; concurrent retrievals are safe.
class ChunkIndex {
 public:
  static ChunkIndex build(const Corpus& corpus, std::size_t chunk_size = 1000);

  // Line-oriented versioned file; floats stored as hexfloats so a
  // save/load round-trip reproduces retrieval results bit-exactly.
  static ChunkIndex load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  RetrievalResult retrieve_top_k(std::string_view query, std::size_t k = 3) const;

  const TfIdfModel& model() const { return model_; }
  const std::vector<Chunk>& chunks() const { return chunks_; }
  const std::vector<SparseVector>& vectors() const { return vectors_; }
  const std::string& corpus_name() const { return corpus_name_; }
  std::size_t chunk_size() const { return chunk_size_; }

 private:
  ChunkIndex() = default;
  void build_postings();

  std::string corpus_name_;
  std::size_t chunk_size_ = 0;
  TfIdfModel model_;
  std::vector<Chunk> chunks_;
  std::vector<SparseVector> vectors_;
  // term column -> (chunk id, weight), chunk ids ascending
  std::vector<std::vector<std::pair<std::uint32_t, double>>> postings_;
};

}  // namespace ragmark
