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

#include "core/corpus.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "core/error.hpp"
#include "core/readability.hpp"
#include "core/rng.hpp"
#include "core/text_util.hpp"

namespace ragmark {

Corpus load_corpus(const std::filesystem::path& path, std::string name) {
  if (!is_identifier(name)) {
    throw Error(ErrorCode::invalid_argument,
                "corpus name must match [A-Za-z0-9_.-]+: '" + name + "'");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open corpus file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw Error(ErrorCode::io, "read failure on corpus file: " + path.string());
  }
  std::string raw = std::move(buffer).str();
  if (raw.empty()) {
    throw Error(ErrorCode::validation, "corpus file is empty: " + path.string());
  }
  if (!is_valid_utf8(raw)) {
    throw Error(ErrorCode::encoding,
                "corpus file is not valid UTF-8: " + path.string());
  }
  Corpus corpus;
  corpus.name = std::move(name);
  corpus.text = normalize_newlines(raw);
  corpus.source_path = path.string();
  if (split_whitespace(corpus.text).empty()) {
    throw Error(ErrorCode::validation,
                "corpus contains no words: " + path.string());
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::io, "cannot open file for writing: " + path.string());
  }
  out << corpus.text;
  if (!out) {
    throw Error(ErrorCode::io, "write failure: " + path.string());
  }
}

std::vector<Chunk> chunk_corpus(const Corpus& corpus, std::size_t chunk_size) {
  if (chunk_size == 0) {
    throw Error(ErrorCode::invalid_argument, "chunk_size must be >= 1");
  }
  std::vector<std::string_view> tokens = split_whitespace(corpus.text);
  std::vector<Chunk> chunks;
  chunks.reserve(tokens.size() / chunk_size + 1);
  for (std::size_t start = 0; start < tokens.size(); start += chunk_size) {
    std::size_t end = std::min(start + chunk_size, tokens.size());
    Chunk chunk;
    chunk.corpus_name = corpus.name;
    chunk.index = chunks.size();
    chunk.word_count = end - start;
    std::string text;
    for (std::size_t i = start; i < end; ++i) {
      if (i > start) text.push_back(' ');
      text.append(tokens[i]);
    }
    chunk.text = std::move(text);
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.lines = count_lines(corpus.text);

  std::unordered_set<std::string> unique;
  std::size_t stripped_chars = 0;
  std::vector<std::string_view> tokens = split_whitespace(corpus.text);
  stats.words = tokens.size();
  for (std::string_view token : tokens) {
    std::string normalized = normalize_token(token);
    stripped_chars += utf8_length(normalized);
    if (!normalized.empty()) unique.insert(std::move(normalized));
  }
  stats.unique_words = unique.size();
  stats.avg_word_length =
      stats.words == 0 ? 0.0
                       : static_cast<double>(stripped_chars) /
                             static_cast<double>(stats.words);
  stats.fk_grade = flesch_kincaid(corpus.text);
  return stats;
}

Corpus generate_random_words(std::size_t word_count, std::uint64_t seed,
                             double mean_length, std::string name) {
  if (word_count == 0) {
    throw Error(ErrorCode::invalid_argument, "word_count must be >= 1");
  }
  if (!(mean_length >= 4.5)) {
    throw Error(ErrorCode::invalid_argument,
                "mean_length must be >= 4.5 so every word has a letter");
  }
  if (!is_identifier(name)) {
    throw Error(ErrorCode::invalid_argument,
                "corpus name must match [A-Za-z0-9_.-]+: '" + name + "'");
  }

  Rng rng(splitmix64(seed));
  std::string text;
  text.reserve(word_count * static_cast<std::size_t>(mean_length + 2.0));
  constexpr std::size_t kWordsPerLine = 20;
  for (std::size_t i = 0; i < word_count; ++i) {
    if (i > 0) text.push_back(i % kWordsPerLine == 0 ? '\n' : ' ');
    auto length = static_cast<std::size_t>(
        std::lround(rng.uniform(mean_length - 4.0, mean_length + 4.0)));
    for (std::size_t j = 0; j < length; ++j) {
      text.push_back(static_cast<char>('a' + rng.below(26)));
    }
  }
  text.push_back('\n');

  Corpus corpus;
  corpus.name = std::move(name);
  corpus.text = std::move(text);
  return corpus;
}

}  // namespace ragmark
