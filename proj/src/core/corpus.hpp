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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ragmark {

struct Corpus {
  std::string name;
  std::string text;         // newline-normalized UTF-8, non-empty
  std::string source_path;  // empty for generated corpora
};

// A fixed-size slice of a corpus token stream. Text is the slice's tokens
// re-joined with single spaces, so it never contains newlines.
struct Chunk {
  std::string corpus_name;
  std::size_t index = 0;
  std::string text;
  std::size_t word_count = 0;
};

struct CorpusStats {
  std::size_t lines = 0;
  std::size_t words = 0;         // whitespace tokens
  std::size_t unique_words = 0;  // case-folded, punctuation-stripped
  double avg_word_length = 0.0;  // codepoints per stripped token
  double fk_grade = 0.0;
};

// Reads a UTF-8 text file and normalizes line endings to \n.
// Fails on missing files, invalid UTF-8, and corpora without any words.
Corpus load_corpus(const std::filesystem::path& path, std::string name);

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Partitions the whitespace token stream into chunks of `chunk_size` words;
// only the final chunk may be short.
std::vector<Chunk> chunk_corpus(const Corpus& corpus, std::size_t chunk_size = 1000);

CorpusStats corpus_stats(const Corpus& corpus);

// Seeded synthetic corpus of lowercase letter strings. Word lengths are
// drawn uniformly from [mean_length - 4, mean_length + 4] and rounded, so
// the expected length equals mean_length. 20 words per line.
Corpus generate_random_words(std::size_t word_count, std::uint64_t seed,
                             double mean_length = 9.55,
                             std::string name = "random_words");

}  // namespace ragmark
