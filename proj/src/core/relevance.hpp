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
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "core/corpus.hpp"

namespace ragmark {

struct TermSet {
  std::unordered_set<std::string> terms;  // case-folded single words

  std::size_t size() const { return terms.size(); }
};

// One term per line; multi-word lines are split and matched token-wise.
TermSet load_term_set(const std::filesystem::path& path);
TermSet make_term_set(const std::vector<std::string>& raw_terms);

// Distinct term-set entries present in the corpus's normalized token set.
std::size_t term_matches(const Corpus& corpus, const TermSet& terms);

double overlap_percent(std::size_t unique_matches, std::size_t term_set_size);

// Plain-text embedding table: one line = word followed by `dimension` reals.
struct WordVectorTable {
  std::size_t dimension = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
};

WordVectorTable load_word_vectors(const std::filesystem::path& path);

// Cosine between the centroid of in-table term-set words and the centroid of
// in-table unique corpus words.
double corpus_embedding_proximity(const Corpus& corpus, const TermSet& terms,
                                  const WordVectorTable& table);

struct RelevanceReport {
  std::string corpus_name;
  std::size_t unique_matches = 0;
  double overlap_percent = 0.0;
  std::optional<double> embedding_proximity;  // absent without a vector table
  CorpusStats stats;
};

RelevanceReport analyze_corpus(const Corpus& corpus, const TermSet& terms,
                               const WordVectorTable* table);

std::string relevance_report_csv(const std::vector<RelevanceReport>& reports);

std::string format_sig_figs(double value, int figures);

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// scores[i][j] = (Q_i . K_j) / sqrt(d_k), no softmax.
Matrix attention_score_matrix(const Matrix& queries, const Matrix& keys,
                              std::size_t d_k);

}  // namespace ragmark
