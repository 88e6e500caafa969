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

#include "core/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "core/error.hpp"
#include "core/text_util.hpp"

namespace ragmark {

namespace {

constexpr std::string_view kIndexMagic = "ragmark.index.v1";

std::string format_hex_double(double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", value);
  return buf;
}

double parse_hex_double(const std::string& text, const char* what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw Error(ErrorCode::parse,
                std::string("index file: bad float for ") + what + ": " + text);
  }
  return value;
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (std::string_view token : split_whitespace(text)) {
    std::string normalized = normalize_token(token);
    if (!normalized.empty()) out.push_back(std::move(normalized));
  }
  return out;
}

}  // namespace

TfIdfModel fit_tfidf(const std::vector<Chunk>& chunks) {
  if (chunks.empty()) {
    throw Error(ErrorCode::invalid_argument, "fit_tfidf requires at least one chunk");
  }
  // Document frequencies over a sorted map give the lexicographic column
  // order directly, which keeps refits bit-identical.
  std::map<std::string, std::size_t> document_frequency;
  for (const Chunk& chunk : chunks) {
    std::vector<std::string> tokens = normalized_tokens(chunk.text);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (std::string& token : tokens) {
      ++document_frequency[std::move(token)];
    }
  }

  TfIdfModel model;
  model.num_documents = chunks.size();
  model.terms.reserve(document_frequency.size());
  model.idf.reserve(document_frequency.size());
  const double m_plus_1 = static_cast<double>(chunks.size()) + 1.0;
  for (const auto& [term, df] : document_frequency) {
    model.vocabulary.emplace(term, static_cast<std::uint32_t>(model.terms.size()));
    model.terms.push_back(term);
    model.idf.push_back(std::log(m_plus_1 / (1.0 + static_cast<double>(df))) + 1.0);
  }
  return model;
}

SparseVector embed_text(const TfIdfModel& model, std::string_view text) {
  std::map<std::uint32_t, double> term_frequency;
  for (std::string_view token : split_whitespace(text)) {
    std::string normalized = normalize_token(token);
    if (normalized.empty()) continue;
    auto it = model.vocabulary.find(normalized);
    if (it == model.vocabulary.end()) continue;  // out of vocabulary
    term_frequency[it->second] += 1.0;
  }
  std::vector<SparseEntry> entries;
  entries.reserve(term_frequency.size());
  double sum_sq = 0.0;
  for (const auto& [column, tf] : term_frequency) {
    double weight = tf * model.idf[column];
    sum_sq += weight * weight;
    entries.push_back({column, weight});
  }
  if (entries.empty()) return SparseVector{};
  double norm = std::sqrt(sum_sq);
  for (SparseEntry& entry : entries) entry.weight /= norm;
  return SparseVector::from_entries(std::move(entries));
}

std::string assemble_context(const std::vector<std::string>& texts) {
  std::string out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out.append(texts[i]);
  }
  return out;
}

ChunkIndex ChunkIndex::build(const Corpus& corpus, std::size_t chunk_size) {
  ChunkIndex index;
  index.corpus_name_ = corpus.name;
  index.chunk_size_ = chunk_size;
  index.chunks_ = chunk_corpus(corpus, chunk_size);
  index.model_ = fit_tfidf(index.chunks_);
  index.vectors_.reserve(index.chunks_.size());
  for (const Chunk& chunk : index.chunks_) {
    index.vectors_.push_back(embed_text(index.model_, chunk.text));
  }
  index.build_postings();
  return index;
}

void ChunkIndex::build_postings() {
  postings_.assign(model_.terms.size(), {});
  for (std::size_t chunk_id = 0; chunk_id < vectors_.size(); ++chunk_id) {
    for (const SparseEntry& entry : vectors_[chunk_id].entries) {
      postings_[entry.column].emplace_back(static_cast<std::uint32_t>(chunk_id),
                                           entry.weight);
    }
  }
}

RetrievalResult ChunkIndex::retrieve_top_k(std::string_view query,
                                           std::size_t k) const {
  if (k == 0) {
    throw Error(ErrorCode::invalid_argument, "retrieve_top_k requires k >= 1");
  }
  if (chunks_.empty()) {
    throw Error(ErrorCode::invalid_argument, "index has no chunks");
  }

  SparseVector query_vec = embed_text(model_, query);

  // Score accumulation visits query terms in ascending column order and
  // postings in ascending chunk order, matching a plain merge-join dot
  // product term for term (identical float results).
  const std::size_t num_chunks = chunks_.size();
  std::vector<double> scores(num_chunks, 0.0);
  std::vector<char> touched(num_chunks, 0);
  for (const SparseEntry& q : query_vec.entries) {
    for (const auto& [chunk_id, weight] : postings_[q.column]) {
      scores[chunk_id] += q.weight * weight;
      touched[chunk_id] = 1;
    }
  }

  std::vector<std::uint32_t> candidates;
  candidates.reserve(num_chunks);
  for (std::uint32_t id = 0; id < num_chunks; ++id) {
    if (touched[id]) candidates.push_back(id);
  }
  std::sort(candidates.begin(), candidates.end(),
            [&scores](std::uint32_t a, std::uint32_t b) {
              if (scores[a] != scores[b]) return scores[a] > scores[b];
              return a < b;
            });

  const std::size_t take = std::min(k, num_chunks);
  RetrievalResult result;
  result.chunk_ids.reserve(take);
  result.scores.reserve(take);
  for (std::size_t i = 0; i < candidates.size() && result.chunk_ids.size() < take; ++i) {
    result.chunk_ids.push_back(candidates[i]);
    result.scores.push_back(scores[candidates[i]]);
  }
  // Fully out-of-vocabulary queries (or too few scored chunks) fall back to
  // index order so min(k, M) chunks are always returned.
  for (std::uint32_t id = 0; id < num_chunks && result.chunk_ids.size() < take; ++id) {
    if (!touched[id]) {
      result.chunk_ids.push_back(id);
      result.scores.push_back(0.0);
    }
  }

  std::vector<std::string> texts;
  texts.reserve(result.chunk_ids.size());
  for (std::uint32_t id : result.chunk_ids) texts.push_back(chunks_[id].text);
  result.context = assemble_context(texts);
  return result;
}

void ChunkIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::io, "cannot open index file for writing: " + path.string());
  }
  out << kIndexMagic << '\n';
  out << "name " << corpus_name_ << '\n';
  out << "chunk_size " << chunk_size_ << '\n';
  out << "vocab " << model_.terms.size() << '\n';
  for (std::size_t i = 0; i < model_.terms.size(); ++i) {
    out << model_.terms[i] << ' ' << format_hex_double(model_.idf[i]) << '\n';
  }
  out << "chunks " << chunks_.size() << '\n';
  for (std::size_t i = 0; i < chunks_.size(); ++i) {
    const Chunk& chunk = chunks_[i];
    const SparseVector& vec = vectors_[i];
    out << "chunk " << chunk.index << ' ' << chunk.word_count << ' '
        << vec.entries.size() << '\n';
    out << "text " << chunk.text << '\n';
    out << "vec";
    for (const SparseEntry& entry : vec.entries) {
      out << ' ' << entry.column << ':' << format_hex_double(entry.weight);
    }
    out << '\n';
  }
  out << "end\n";
  if (!out) {
    throw Error(ErrorCode::io, "write failure on index file: " + path.string());
  }
}

ChunkIndex ChunkIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open index file: " + path.string());
  }
  auto fail = [&path](const std::string& why) -> Error {
    return Error(ErrorCode::parse, "index file " + path.string() + ": " + why);
  };

  std::string line;
  if (!std::getline(in, line) || line != kIndexMagic) {
    throw fail("missing or unsupported format header");
  }

  ChunkIndex index;
  std::size_t vocab_size = 0;
  std::size_t chunk_count = 0;

  auto read_keyword_line = [&](const char* keyword) -> std::string {
    if (!std::getline(in, line)) throw fail(std::string("unexpected EOF before ") + keyword);
    std::string prefix = std::string(keyword) + ' ';
    if (line.rfind(prefix, 0) != 0) {
      throw fail(std::string("expected '") + keyword + "' line, got: " + line);
    }
    return line.substr(prefix.size());
  };

  index.corpus_name_ = read_keyword_line("name");
  if (!is_identifier(index.corpus_name_)) throw fail("bad corpus name");
  try {
    index.chunk_size_ = std::stoull(read_keyword_line("chunk_size"));
    vocab_size = std::stoull(read_keyword_line("vocab"));
  } catch (const std::exception&) {
    throw fail("bad integer in header");
  }
  if (index.chunk_size_ == 0) throw fail("chunk_size must be >= 1");

  index.model_.terms.reserve(vocab_size);
  index.model_.idf.reserve(vocab_size);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    if (!std::getline(in, line)) throw fail("unexpected EOF in vocabulary");
    std::size_t space = line.find(' ');
    if (space == std::string::npos || space == 0) throw fail("bad vocabulary line: " + line);
    std::string term = line.substr(0, space);
    index.model_.vocabulary.emplace(term, static_cast<std::uint32_t>(i));
    index.model_.terms.push_back(std::move(term));
    index.model_.idf.push_back(parse_hex_double(line.substr(space + 1), "idf"));
  }

  try {
    chunk_count = std::stoull(read_keyword_line("chunks"));
  } catch (const std::exception&) {
    throw fail("bad chunk count");
  }
  if (chunk_count == 0) throw fail("index must contain at least one chunk");
  index.model_.num_documents = chunk_count;

  index.chunks_.reserve(chunk_count);
  index.vectors_.reserve(chunk_count);
  for (std::size_t i = 0; i < chunk_count; ++i) {
    std::string header = read_keyword_line("chunk");
    std::istringstream fields(header);
    std::size_t chunk_id = 0, word_count = 0, nnz = 0;
    if (!(fields >> chunk_id >> word_count >> nnz) || chunk_id != i) {
      throw fail("bad chunk header: " + header);
    }
    Chunk chunk;
    chunk.corpus_name = index.corpus_name_;
    chunk.index = chunk_id;
    chunk.word_count = word_count;
    chunk.text = read_keyword_line("text");

    if (!std::getline(in, line)) throw fail("unexpected EOF in chunk vector");
    if (line != "vec" && line.rfind("vec ", 0) != 0) {
      throw fail("expected 'vec' line, got: " + line);
    }
    std::vector<SparseEntry> entries;
    entries.reserve(nnz);
    if (line.size() > 4) {
      std::istringstream pairs(line.substr(4));
      std::string pair;
      while (pairs >> pair) {
        std::size_t colon = pair.find(':');
        if (colon == std::string::npos) throw fail("bad vector entry: " + pair);
        SparseEntry entry;
        try {
          entry.column = static_cast<std::uint32_t>(std::stoul(pair.substr(0, colon)));
        } catch (const std::exception&) {
          throw fail("bad vector column: " + pair);
        }
        if (entry.column >= vocab_size) throw fail("vector column out of range: " + pair);
        entry.weight = parse_hex_double(pair.substr(colon + 1), "weight");
        entries.push_back(entry);
      }
    }
    if (entries.size() != nnz) throw fail("chunk vector entry count mismatch");
    index.chunks_.push_back(std::move(chunk));
    index.vectors_.push_back(SparseVector::from_entries(std::move(entries)));
  }

  if (!std::getline(in, line) || line != "end") throw fail("missing end marker");

  index.build_postings();
  return index;
}

}  // namespace ragmark
