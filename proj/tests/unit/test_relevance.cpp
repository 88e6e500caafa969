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

#include "doctest.h"

#include <cmath>

#include "core/error.hpp"
#include "core/relevance.hpp"
#include "core/rng.hpp"
#include "test_helpers.hpp"

using namespace ragmark;
using ragmark::testing::TempDir;
using ragmark::testing::write_file;

namespace {

Corpus corpus_from(std::string text, std::string name = "c") {
  Corpus corpus;
  corpus.name = std::move(name);
  corpus.text = std::move(text);
  return corpus;
}

}  // namespace

TEST_CASE("term_matches counts distinct set intersections") {
  TermSet terms = make_term_set({"kidney", "nephron"});
  CHECK(term_matches(corpus_from("kidney stone"), terms) == 1);
  CHECK(term_matches(corpus_from("liver heart"), terms) == 0);
  CHECK(term_matches(corpus_from("kidney kidney KIDNEY."), terms) == 1);
  CHECK_THROWS_AS(term_matches(corpus_from("x"), TermSet{}), Error);
}

TEST_CASE("multi-word term lines are matched token-wise") {
  TermSet terms = make_term_set({"acute kidney injury"});
  CHECK(terms.size() == 3);
  CHECK(term_matches(corpus_from("injury report"), terms) == 1);
}

TEST_CASE("overlap_percent reproduces the printed table values") {
  CHECK(std::fabs(overlap_percent(903, 2709) - 33.3) <= 0.05);
  CHECK(std::fabs(overlap_percent(733, 2709) - 27.1) <= 0.05);
  CHECK(std::fabs(overlap_percent(67, 2709) - 2.47) <= 0.05);
  CHECK(std::fabs(overlap_percent(240, 2709) - 8.86) <= 0.05);
  CHECK(overlap_percent(0, 2709) == 0.0);
  CHECK_THROWS_AS(overlap_percent(1, 0), Error);
  CHECK_THROWS_AS(overlap_percent(5, 4), Error);
}

TEST_CASE("overlap_percent is monotone in matches") {
  double previous = -1.0;
  for (std::size_t matches = 0; matches <= 100; matches += 10) {
    double value = overlap_percent(matches, 100);
    CHECK(value >= previous);
    previous = value;
  }
}

TEST_CASE("sig-fig formatting") {
  CHECK(format_sig_figs(33.3333, 3) == "33.3");
  CHECK(format_sig_figs(2.47323, 3) == "2.47");
  CHECK(format_sig_figs(8.85936, 3) == "8.86");
  CHECK(format_sig_figs(27.0579, 3) == "27.1");
}

TEST_CASE("word vector table loading") {
  TempDir dir("vec");
  write_file(dir.file("glove.txt"), "Alpha 1 0\nbeta 0 1\ngamma 0.5 0.5\n");
  WordVectorTable table = load_word_vectors(dir.file("glove.txt"));
  CHECK(table.dimension == 2);
  CHECK(table.vectors.size() == 3);
  CHECK(table.vectors.count("alpha") == 1);  // case-folded key

  write_file(dir.file("ragged.txt"), "a 1 2\nb 1\n");
  CHECK_THROWS_AS(load_word_vectors(dir.file("ragged.txt")), Error);
  write_file(dir.file("empty.txt"), "");
  CHECK_THROWS_AS(load_word_vectors(dir.file("empty.txt")), Error);
  CHECK_THROWS_AS(load_word_vectors(dir.file("missing.txt")), Error);
}

TEST_CASE("embedding proximity centroids") {
  WordVectorTable table;
  table.dimension = 2;
  table.vectors["a"] = {1.0, 0.0};
  table.vectors["b"] = {0.0, 1.0};

  TermSet terms_a = make_term_set({"a"});
  CHECK(corpus_embedding_proximity(corpus_from("b"), terms_a, table) ==
        doctest::Approx(0.0).epsilon(1e-12));

  TermSet both = make_term_set({"a", "b"});
  CHECK(corpus_embedding_proximity(corpus_from("a b"), both, table) ==
        doctest::Approx(1.0).epsilon(1e-9));

  // duplicates do not move the unique-word centroid
  double base = corpus_embedding_proximity(corpus_from("a b"), terms_a, table);
  double duplicated = corpus_embedding_proximity(corpus_from("a a a b"), terms_a, table);
  CHECK(base == duplicated);

  CHECK_THROWS_AS(corpus_embedding_proximity(corpus_from("zzz"), terms_a, table), Error);
  TermSet unknown = make_term_set({"qqq"});
  CHECK_THROWS_AS(corpus_embedding_proximity(corpus_from("a"), unknown, table), Error);
}

TEST_CASE("analyze_corpus and csv rendering") {
  TermSet terms = make_term_set({"kidney", "stone", "nephron"});
  Corpus corpus = corpus_from("The kidney stone. A kidney ached.", "sample");
  RelevanceReport report = analyze_corpus(corpus, terms, nullptr);
  CHECK(report.unique_matches == 2);
  CHECK(report.overlap_percent == doctest::Approx(200.0 / 3.0));
  CHECK_FALSE(report.embedding_proximity.has_value());
  CHECK(report.stats.words == 6);

  std::string csv = relevance_report_csv({report});
  CHECK(csv.find("corpus,unique_matches,overlap_percent") == 0);
  CHECK(csv.find("sample,2,66.7,,") != std::string::npos);
}

TEST_CASE("attention scores identity fixture") {
  Matrix identity(2, 2);
  identity.at(0, 0) = 1.0;
  identity.at(1, 1) = 1.0;
  Matrix scores = attention_score_matrix(identity, identity, 1);
  CHECK(scores.at(0, 0) == doctest::Approx(1.0));
  CHECK(scores.at(0, 1) == doctest::Approx(0.0));
  CHECK(scores.at(1, 0) == doctest::Approx(0.0));
  CHECK(scores.at(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("attention scores scale with sqrt(d_k)") {
  Rng rng(31);
  Matrix q(3, 4), k(2, 4);
  for (double& v : q.data) v = rng.uniform(-2.0, 2.0);
  for (double& v : k.data) v = rng.uniform(-2.0, 2.0);
  Matrix s1 = attention_score_matrix(q, k, 1);
  Matrix s4 = attention_score_matrix(q, k, 4);
  for (std::size_t i = 0; i < s1.data.size(); ++i) {
    CHECK(s4.data[i] == doctest::Approx(s1.data[i] / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("attention scores hand dot products") {
  Matrix q(1, 2);
  q.at(0, 0) = 1.0;
  q.at(0, 1) = 2.0;
  Matrix k(2, 2);
  k.at(0, 0) = 3.0;
  k.at(0, 1) = 4.0;
  k.at(1, 0) = 0.0;
  k.at(1, 1) = 1.0;
  Matrix scores = attention_score_matrix(q, k, 2);
  CHECK(std::fabs(scores.at(0, 0) - 7.7782) <= 1e-4);
  CHECK(std::fabs(scores.at(0, 1) - 1.4142) <= 1e-4);
}

TEST_CASE("attention transpose symmetry") {
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    std::size_t n = 1 + rng.below(4), m = 1 + rng.below(4), d = 1 + rng.below(5);
    Matrix q(n, d), k(m, d);
    for (double& v : q.data) v = rng.uniform(-3.0, 3.0);
    for (double& v : k.data) v = rng.uniform(-3.0, 3.0);
    Matrix qk = attention_score_matrix(q, k, d);
    Matrix kq = attention_score_matrix(k, q, d);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        CHECK(std::fabs(qk.at(r, c) - kq.at(c, r)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("attention dimension mismatch is rejected") {
  Matrix q(1, 2), k(1, 3);
  CHECK_THROWS_AS(attention_score_matrix(q, k, 1), Error);
  Matrix ok(1, 2);
  CHECK_THROWS_AS(attention_score_matrix(ok, ok, 0), Error);
}

TEST_CASE("term set file loading") {
  TempDir dir("terms");
  write_file(dir.file("terms.txt"), "Kidney\nnephron\nacute kidney injury\nKIDNEY\n");
  TermSet terms = load_term_set(dir.file("terms.txt"));
  CHECK(terms.size() == 4);  // kidney, nephron, acute, injury
  CHECK(terms.terms.count("kidney") == 1);
  CHECK_THROWS_AS(load_term_set(dir.file("missing.txt")), Error);
}
