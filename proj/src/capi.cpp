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

#include "ragmark.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "core/corpus.hpp"
#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/extraction.hpp"
#include "core/readability.hpp"
#include "core/relevance.hpp"
#include "core/report.hpp"
#include "core/stats.hpp"
#include "core/tfidf.hpp"

namespace {

thread_local std::string g_last_error;

ragmark_status status_of(ragmark::ErrorCode code) {
  using ragmark::ErrorCode;
  switch (code) {
    case ErrorCode::io:
      return RAGMARK_ERR_IO;
    case ErrorCode::encoding:
      return RAGMARK_ERR_ENCODING;
    case ErrorCode::parse:
      return RAGMARK_ERR_PARSE;
    case ErrorCode::invalid_argument:
      return RAGMARK_ERR_INVALID_ARGUMENT;
    case ErrorCode::validation:
      return RAGMARK_ERR_VALIDATION;
    case ErrorCode::http:
      return RAGMARK_ERR_HTTP;
    case ErrorCode::internal:
      return RAGMARK_ERR_INTERNAL;
  }
  return RAGMARK_ERR_INTERNAL;
}

template <typename Fn>
ragmark_status guarded(Fn&& fn) {
  try {
    fn();
    return RAGMARK_OK;
  } catch (const ragmark::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RAGMARK_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RAGMARK_ERR_INTERNAL;
  }
}

ragmark_status invalid(const char* message) {
  g_last_error = message;
  return RAGMARK_ERR_INVALID_ARGUMENT;
}

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

std::vector<ragmark::GroupSample> groups_from_flat(const double* values,
                                                   const size_t* group_sizes,
                                                   size_t group_count) {
  std::vector<ragmark::GroupSample> groups;
  groups.reserve(group_count);
  size_t offset = 0;
  for (size_t g = 0; g < group_count; ++g) {
    ragmark::GroupSample group;
    group.condition_name = "group" + std::to_string(g);
    group.values.assign(values + offset, values + offset + group_sizes[g]);
    offset += group_sizes[g];
    groups.push_back(std::move(group));
  }
  return groups;
}

}  // namespace

struct ragmark_corpus {
  ragmark::Corpus value;
};
struct ragmark_index {
  ragmark::ChunkIndex value;
};
struct ragmark_termset {
  ragmark::TermSet value;
};
struct ragmark_wordvecs {
  ragmark::WordVectorTable value;
};
struct ragmark_ruleset {
  ragmark::RuleSet value;
};
struct ragmark_config {
  ragmark::ExperimentConfig value;
};

extern "C" {

const char* ragmark_version(void) { return "0.1.0"; }

const char* ragmark_last_error(void) { return g_last_error.c_str(); }

void ragmark_string_free(char* s) { std::free(s); }

/* ---------------- corpora ---------------- */

ragmark_status ragmark_corpus_load(const char* path, const char* name,
                                   ragmark_corpus** out) {
  if (!path || !name || !out) return invalid("path, name and out must be non-NULL");
  return guarded([&] {
    *out = new ragmark_corpus{ragmark::load_corpus(path, name)};
  });
}

ragmark_status ragmark_corpus_generate_random(uint64_t word_count, uint64_t seed,
                                              double mean_length, const char* name,
                                              ragmark_corpus** out) {
  if (!name || !out) return invalid("name and out must be non-NULL");
  return guarded([&] {
    double mean = mean_length > 0.0 ? mean_length : 9.55;
    *out = new ragmark_corpus{
        ragmark::generate_random_words(word_count, seed, mean, name)};
  });
}

ragmark_status ragmark_corpus_save(const ragmark_corpus* corpus, const char* path) {
  if (!corpus || !path) return invalid("corpus and path must be non-NULL");
  return guarded([&] { ragmark::save_corpus(corpus->value, path); });
}

ragmark_status ragmark_corpus_compute_stats(const ragmark_corpus* corpus,
                                            ragmark_corpus_stats* out) {
  if (!corpus || !out) return invalid("corpus and out must be non-NULL");
  return guarded([&] {
    ragmark::CorpusStats stats = ragmark::corpus_stats(corpus->value);
    out->lines = stats.lines;
    out->words = stats.words;
    out->unique_words = stats.unique_words;
    out->avg_word_length = stats.avg_word_length;
    out->fk_grade = stats.fk_grade;
  });
}

void ragmark_corpus_free(ragmark_corpus* corpus) { delete corpus; }

ragmark_status ragmark_flesch_kincaid(const char* text, double* grade) {
  if (!text || !grade) return invalid("text and grade must be non-NULL");
  return guarded([&] { *grade = ragmark::flesch_kincaid(text); });
}

/* ---------------- index ---------------- */

ragmark_status ragmark_index_build(const ragmark_corpus* corpus, size_t chunk_size,
                                   ragmark_index** out) {
  if (!corpus || !out) return invalid("corpus and out must be non-NULL");
  return guarded([&] {
    *out = new ragmark_index{ragmark::ChunkIndex::build(corpus->value, chunk_size)};
  });
}

ragmark_status ragmark_index_save(const ragmark_index* index, const char* path) {
  if (!index || !path) return invalid("index and path must be non-NULL");
  return guarded([&] { index->value.save(path); });
}

ragmark_status ragmark_index_load(const char* path, ragmark_index** out) {
  if (!path || !out) return invalid("path and out must be non-NULL");
  return guarded([&] {
    *out = new ragmark_index{ragmark::ChunkIndex::load(path)};
  });
}

size_t ragmark_index_chunk_count(const ragmark_index* index) {
  return index ? index->value.chunks().size() : 0;
}

ragmark_status ragmark_index_retrieve(const ragmark_index* index, const char* query,
                                      size_t k, ragmark_retrieval* out) {
  if (!index || !query || !out) return invalid("index, query and out must be non-NULL");
  return guarded([&] {
    ragmark::RetrievalResult result = index->value.retrieve_top_k(query, k);
    out->count = result.chunk_ids.size();
    out->chunk_ids =
        static_cast<uint32_t*>(std::malloc(sizeof(uint32_t) * out->count));
    out->scores = static_cast<double*>(std::malloc(sizeof(double) * out->count));
    if ((out->count > 0 && (!out->chunk_ids || !out->scores))) {
      std::free(out->chunk_ids);
      std::free(out->scores);
      throw std::bad_alloc();
    }
    for (size_t i = 0; i < out->count; ++i) {
      out->chunk_ids[i] = result.chunk_ids[i];
      out->scores[i] = result.scores[i];
    }
    out->context = duplicate(result.context);
  });
}

void ragmark_retrieval_free(ragmark_retrieval* retrieval) {
  if (!retrieval) return;
  std::free(retrieval->chunk_ids);
  std::free(retrieval->scores);
  std::free(retrieval->context);
  retrieval->chunk_ids = nullptr;
  retrieval->scores = nullptr;
  retrieval->context = nullptr;
  retrieval->count = 0;
}

void ragmark_index_free(ragmark_index* index) { delete index; }

/* ---------------- relevance ---------------- */

ragmark_status ragmark_termset_load(const char* path, ragmark_termset** out) {
  if (!path || !out) return invalid("path and out must be non-NULL");
  return guarded([&] {
    *out = new ragmark_termset{ragmark::load_term_set(path)};
  });
}

size_t ragmark_termset_size(const ragmark_termset* terms) {
  return terms ? terms->value.size() : 0;
}

void ragmark_termset_free(ragmark_termset* terms) { delete terms; }

ragmark_status ragmark_wordvecs_load(const char* path, ragmark_wordvecs** out) {
  if (!path || !out) return invalid("path and out must be non-NULL");
  return guarded([&] {
    *out = new ragmark_wordvecs{ragmark::load_word_vectors(path)};
  });
}

void ragmark_wordvecs_free(ragmark_wordvecs* vectors) { delete vectors; }

ragmark_status ragmark_relevance_csv(const ragmark_corpus* const* corpora,
                                     size_t corpus_count, const ragmark_termset* terms,
                                     const ragmark_wordvecs* vectors, char** out_csv) {
  if (!corpora || corpus_count == 0 || !terms || !out_csv) {
    return invalid("corpora, terms and out_csv must be non-NULL");
  }
  return guarded([&] {
    std::vector<ragmark::RelevanceReport> reports;
    reports.reserve(corpus_count);
    for (size_t i = 0; i < corpus_count; ++i) {
      if (corpora[i] == nullptr) {
        throw ragmark::Error(ragmark::ErrorCode::invalid_argument,
                             "corpora contains a NULL entry");
      }
      reports.push_back(ragmark::analyze_corpus(
          corpora[i]->value, terms->value, vectors ? &vectors->value : nullptr));
    }
    *out_csv = duplicate(ragmark::relevance_report_csv(reports));
  });
}

ragmark_status ragmark_attention_scores(const double* queries, size_t n,
                                        const double* keys, size_t m, size_t dim,
                                        size_t d_k, double* out_scores) {
  if (!queries || !keys || !out_scores) {
    return invalid("queries, keys and out_scores must be non-NULL");
  }
  return guarded([&] {
    ragmark::Matrix q(n, dim);
    std::memcpy(q.data.data(), queries, sizeof(double) * n * dim);
    ragmark::Matrix kmat(m, dim);
    std::memcpy(kmat.data.data(), keys, sizeof(double) * m * dim);
    ragmark::Matrix scores = ragmark::attention_score_matrix(q, kmat, d_k);
    std::memcpy(out_scores, scores.data.data(), sizeof(double) * n * m);
  });
}

/* ---------------- extraction ---------------- */

ragmark_status ragmark_ruleset_default(ragmark_ruleset** out) {
  if (!out) return invalid("out must be non-NULL");
  return guarded([&] {
    *out = new ragmark_ruleset{ragmark::RuleSet::defaults()};
  });
}

ragmark_status ragmark_ruleset_load(const char* path, ragmark_ruleset** out) {
  if (!path || !out) return invalid("path and out must be non-NULL");
  return guarded([&] {
    *out = new ragmark_ruleset{ragmark::RuleSet::load(path)};
  });
}

void ragmark_ruleset_free(ragmark_ruleset* rules) { delete rules; }

ragmark_status ragmark_extract_choice(const ragmark_ruleset* rules, const char* output,
                                      char* letter_out) {
  if (!rules || !output || !letter_out) {
    return invalid("rules, output and letter_out must be non-NULL");
  }
  return guarded([&] {
    ragmark::ExtractedAnswer answer = ragmark::extract_choice(output, rules->value);
    *letter_out = answer.letter.value_or('\0');
  });
}

ragmark_status ragmark_extraction_regression(const ragmark_ruleset* rules,
                                             const char* corpus_path, size_t* passed,
                                             size_t* total, char** out_report) {
  if (!rules || !corpus_path || !passed || !total) {
    return invalid("rules, corpus_path, passed and total must be non-NULL");
  }
  return guarded([&] {
    auto cases = ragmark::load_regression_corpus(corpus_path);
    ragmark::RegressionOutcome outcome =
        ragmark::run_extraction_regression(cases, rules->value);
    *passed = outcome.passed;
    *total = outcome.total;
    if (out_report) {
      std::string report = std::to_string(outcome.passed) + "/" +
                           std::to_string(outcome.total) + " cases extracted correctly\n";
      for (const auto& failure : outcome.failures) {
        report += "line " + std::to_string(failure.line) + ": expected " +
                  failure.expected + ", got " + failure.actual + ": " + failure.output +
                  "\n";
      }
      *out_report = duplicate(report);
    }
  });
}

/* ---------------- statistics ---------------- */

ragmark_status ragmark_mean_sem(const double* values, size_t n, double* mean,
                                double* sem) {
  if (!values || !mean || !sem) return invalid("values, mean and sem must be non-NULL");
  return guarded([&] {
    ragmark::MeanSem result = ragmark::mean_sem(std::vector<double>(values, values + n));
    *mean = result.mean;
    *sem = result.sem;
  });
}

ragmark_status ragmark_one_way_anova(const double* values, const size_t* group_sizes,
                                     size_t group_count, double* f_stat,
                                     double* p_value, uint64_t* df_between,
                                     uint64_t* df_within) {
  if (!values || !group_sizes || !f_stat || !p_value) {
    return invalid("values, group_sizes, f_stat and p_value must be non-NULL");
  }
  return guarded([&] {
    ragmark::AnovaResult result =
        ragmark::one_way_anova(groups_from_flat(values, group_sizes, group_count));
    *f_stat = result.f_stat;
    *p_value = result.p_value;
    if (df_between) *df_between = result.df_between;
    if (df_within) *df_within = result.df_within;
  });
}

ragmark_status ragmark_welch_t_test(const double* a, size_t na, const double* b,
                                    size_t nb, double* t, double* df, double* p) {
  if (!a || !b || !p) return invalid("a, b and p must be non-NULL");
  return guarded([&] {
    ragmark::WelchResult result = ragmark::welch_t_test(
        std::vector<double>(a, a + na), std::vector<double>(b, b + nb));
    if (t) *t = result.t;
    if (df) *df = result.df;
    *p = result.p;
  });
}

ragmark_status ragmark_dunnett(const double* values, const size_t* group_sizes,
                               size_t group_count, double* adjusted_p) {
  if (!values || !group_sizes || !adjusted_p) {
    return invalid("values, group_sizes and adjusted_p must be non-NULL");
  }
  if (group_count < 2) return invalid("need a control group and at least one treatment");
  return guarded([&] {
    auto groups = groups_from_flat(values, group_sizes, group_count);
    std::vector<ragmark::GroupSample> treatments(groups.begin() + 1, groups.end());
    ragmark::DunnettResult result =
        ragmark::dunnett_many_to_one(groups.front(), treatments);
    for (size_t i = 0; i + 1 < group_count; ++i) adjusted_p[i] = result.adjusted_p[i];
  });
}

/* ---------------- experiment ---------------- */

ragmark_status ragmark_config_load(const char* path, ragmark_config** out) {
  if (!path || !out) return invalid("path and out must be non-NULL");
  return guarded([&] {
    *out = new ragmark_config{ragmark::load_experiment_config(path)};
  });
}

ragmark_status ragmark_config_set_seed(ragmark_config* config, uint64_t seed) {
  if (!config) return invalid("config must be non-NULL");
  config->value.seed = seed;
  return RAGMARK_OK;
}

ragmark_status ragmark_config_set_parallelism(ragmark_config* config,
                                              size_t parallelism) {
  if (!config) return invalid("config must be non-NULL");
  config->value.parallelism = parallelism;
  return RAGMARK_OK;
}

ragmark_status ragmark_config_set_log_raw(ragmark_config* config, int log_raw) {
  if (!config) return invalid("config must be non-NULL");
  config->value.endpoint.log_raw = log_raw != 0;
  return RAGMARK_OK;
}

void ragmark_config_free(ragmark_config* config) { delete config; }

ragmark_status ragmark_run_experiment(const ragmark_config* config,
                                      ragmark_progress_fn progress, void* user_data) {
  if (!config) return invalid("config must be non-NULL");
  return guarded([&] {
    ragmark::ProgressFn fn;
    if (progress) {
      fn = [progress, user_data](const std::string& message) {
        progress(message.c_str(), user_data);
      };
    }
    ragmark::run_experiment(config->value, fn);
  });
}

ragmark_status ragmark_write_report(const char* run_dir, const char* out_dir) {
  if (!run_dir) return invalid("run_dir must be non-NULL");
  return guarded([&] {
    ragmark::write_report(run_dir, out_dir ? out_dir : run_dir);
  });
}

}  // extern "C"
