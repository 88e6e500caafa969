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

#include "core/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/text_util.hpp"

namespace ragmark {

namespace {

std::unordered_set<std::string> unique_corpus_words(const Corpus& corpus) {
  std::unordered_set<std::string> words;
  for (std::string_view token : split_whitespace(corpus.text)) {
    std::string normalized = normalize_token(token);
    if (!normalized.empty()) words.insert(std::move(normalized));
  }
  return words;
}

// Centroid over the in-table subset of `words`, summed in sorted word order
// so the result does not depend on hash-set iteration order.
std::optional<std::vector<double>> centroid(
    const std::unordered_set<std::string>& words, const WordVectorTable& table) {
  std::vector<const std::vector<double>*> rows;
  std::vector<std::string> sorted(words.begin(), words.end());
  std::sort(sorted.begin(), sorted.end());
  for (const std::string& word : sorted) {
    auto it = table.vectors.find(word);
    if (it != table.vectors.end()) rows.push_back(&it->second);
  }
  if (rows.empty()) return std::nullopt;
  std::vector<double> mean(table.dimension, 0.0);
  for (const auto* row : rows) {
    for (std::size_t d = 0; d < table.dimension; ++d) mean[d] += (*row)[d];
  }
  for (double& v : mean) v /= static_cast<double>(rows.size());
  return mean;
}

double dense_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

TermSet make_term_set(const std::vector<std::string>& raw_terms) {
  TermSet set;
  for (const std::string& raw : raw_terms) {
    for (std::string_view token : split_whitespace(raw)) {
      std::string normalized = normalize_token(token);
      if (!normalized.empty()) set.terms.insert(std::move(normalized));
    }
  }
  return set;
}

TermSet load_term_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open term set file: " + path.string());
  }
  TermSet set;
  std::string line;
  while (std::getline(in, line)) {
    for (std::string_view token : split_whitespace(line)) {
      std::string normalized = normalize_token(token);
      if (!normalized.empty()) set.terms.insert(std::move(normalized));
    }
  }
  return set;
}

std::size_t term_matches(const Corpus& corpus, const TermSet& terms) {
  if (terms.terms.empty()) {
    throw Error(ErrorCode::invalid_argument, "term set is empty");
  }
  std::unordered_set<std::string> words = unique_corpus_words(corpus);
  std::size_t matches = 0;
  for (const std::string& term : terms.terms) {
    if (words.count(term)) ++matches;
  }
  return matches;
}

double overlap_percent(std::size_t unique_matches, std::size_t term_set_size) {
  if (term_set_size == 0) {
    throw Error(ErrorCode::invalid_argument, "term set size must be > 0");
  }
  if (unique_matches > term_set_size) {
    throw Error(ErrorCode::invalid_argument,
                "unique_matches cannot exceed the term set size");
  }
  return 100.0 * static_cast<double>(unique_matches) /
         static_cast<double>(term_set_size);
}

WordVectorTable load_word_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open embedding file: " + path.string());
  }
  WordVectorTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    std::vector<double> vec;
    double value;
    while (fields >> value) vec.push_back(value);
    if (word.empty() || vec.empty()) {
      throw Error(ErrorCode::parse, "embedding file " + path.string() + ": bad line " +
                                        std::to_string(line_no));
    }
    if (table.dimension == 0) {
      table.dimension = vec.size();
    } else if (vec.size() != table.dimension) {
      throw Error(ErrorCode::parse,
                  "embedding file " + path.string() + ": dimension mismatch at line " +
                      std::to_string(line_no));
    }
    table.vectors[to_lower_ascii(word)] = std::move(vec);
  }
  if (table.vectors.empty()) {
    throw Error(ErrorCode::validation, "embedding file has no vectors: " + path.string());
  }
  return table;
}

double corpus_embedding_proximity(const Corpus& corpus, const TermSet& terms,
                                  const WordVectorTable& table) {
  if (terms.terms.empty()) {
    throw Error(ErrorCode::invalid_argument, "term set is empty");
  }
  auto term_centroid = centroid(terms.terms, table);
  if (!term_centroid) {
    throw Error(ErrorCode::validation, "no term-set words found in the vector table");
  }
  auto corpus_centroid = centroid(unique_corpus_words(corpus), table);
  if (!corpus_centroid) {
    throw Error(ErrorCode::validation, "no corpus words found in the vector table");
  }
  return dense_cosine(*term_centroid, *corpus_centroid);
}

RelevanceReport analyze_corpus(const Corpus& corpus, const TermSet& terms,
                               const WordVectorTable* table) {
  RelevanceReport report;
  report.corpus_name = corpus.name;
  report.unique_matches = term_matches(corpus, terms);
  report.overlap_percent = overlap_percent(report.unique_matches, terms.size());
  if (table != nullptr) {
    report.embedding_proximity = corpus_embedding_proximity(corpus, terms, *table);
  }
  report.stats = corpus_stats(corpus);
  return report;
}

std::string format_sig_figs(double value, int figures) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", figures, value);
  return buf;
}

std::string relevance_report_csv(const std::vector<RelevanceReport>& reports) {
  std::string out =
      "corpus,unique_matches,overlap_percent,vector_proximity,"
      "lines,words,unique_words,avg_word_length,fk_grade\n";
  char buf[128];
  for (const RelevanceReport& r : reports) {
    out += r.corpus_name;
    out += ',';
    out += std::to_string(r.unique_matches);
    out += ',';
    out += format_sig_figs(r.overlap_percent, 3);
    out += ',';
    if (r.embedding_proximity) {
      std::snprintf(buf, sizeof(buf), "%.2f", *r.embedding_proximity);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), ",%zu,%zu,%zu,%.2f,%.2f\n", r.stats.lines,
                  r.stats.words, r.stats.unique_words, r.stats.avg_word_length,
                  r.stats.fk_grade);
    out += buf;
  }
  return out;
}

Matrix attention_score_matrix(const Matrix& queries, const Matrix& keys,
                              std::size_t d_k) {
  if (queries.cols != keys.cols) {
    throw Error(ErrorCode::invalid_argument,
                "query and key matrices must share the inner dimension");
  }
  if (d_k == 0) {
    throw Error(ErrorCode::invalid_argument, "d_k must be >= 1");
  }
  if (queries.data.size() != queries.rows * queries.cols ||
      keys.data.size() != keys.rows * keys.cols) {
    throw Error(ErrorCode::invalid_argument, "matrix data size mismatch");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));
  Matrix scores(queries.rows, keys.rows);
  for (std::size_t i = 0; i < queries.rows; ++i) {
    for (std::size_t j = 0; j < keys.rows; ++j) {
      double dot = 0.0;
      for (std::size_t d = 0; d < queries.cols; ++d) {
        dot += queries.at(i, d) * keys.at(j, d);
      }
      scores.at(i, j) = dot * scale;
    }
  }
  return scores;
}

}  // namespace ragmark
