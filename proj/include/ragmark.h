/* Copyright 2026 the ragmark project
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* ragmark: a retrieval-augmented-generation experiment harness.
 *
 * C API over the shared library. Every function returns a ragmark_status;
 * on failure, ragmark_last_error() holds a thread-local message describing
 * what went wrong. Objects are opaque handles released with their matching
 * *_free function. Strings returned through char** out-parameters are
 * heap-allocated and released with ragmark_string_free.
 */

#ifndef RAGMARK_H
#define RAGMARK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RAGMARK_BUILD_SHARED)
#define RAGMARK_API __declspec(dllexport)
#else
#define RAGMARK_API __declspec(dllimport)
#endif
#else
#define RAGMARK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ragmark_status {
  RAGMARK_OK = 0,
  RAGMARK_ERR_IO = 1,
  RAGMARK_ERR_ENCODING = 2,
  RAGMARK_ERR_PARSE = 3,
  RAGMARK_ERR_INVALID_ARGUMENT = 4,
  RAGMARK_ERR_VALIDATION = 5,
  RAGMARK_ERR_HTTP = 6,
  RAGMARK_ERR_INTERNAL = 7
} ragmark_status;

RAGMARK_API const char* ragmark_version(void);

/* Message for the most recent failure on this thread; never NULL. */
RAGMARK_API const char* ragmark_last_error(void);

RAGMARK_API void ragmark_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Corpora                                                             */

typedef struct ragmark_corpus ragmark_corpus;

RAGMARK_API ragmark_status ragmark_corpus_load(const char* path, const char* name,
                                               ragmark_corpus** out);

/* mean_length <= 0 selects the default (9.55). */
RAGMARK_API ragmark_status ragmark_corpus_generate_random(uint64_t word_count,
                                                          uint64_t seed,
                                                          double mean_length,
                                                          const char* name,
                                                          ragmark_corpus** out);

RAGMARK_API ragmark_status ragmark_corpus_save(const ragmark_corpus* corpus,
                                               const char* path);

typedef struct ragmark_corpus_stats {
  uint64_t lines;
  uint64_t words;
  uint64_t unique_words;
  double avg_word_length;
  double fk_grade;
} ragmark_corpus_stats;

RAGMARK_API ragmark_status ragmark_corpus_compute_stats(const ragmark_corpus* corpus,
                                                        ragmark_corpus_stats* out);

RAGMARK_API void ragmark_corpus_free(ragmark_corpus* corpus);

RAGMARK_API ragmark_status ragmark_flesch_kincaid(const char* text, double* grade);

/* ------------------------------------------------------------------ */
/* TF-IDF retrieval index                                              */

typedef struct ragmark_index ragmark_index;

RAGMARK_API ragmark_status ragmark_index_build(const ragmark_corpus* corpus,
                                               size_t chunk_size,
                                               ragmark_index** out);
RAGMARK_API ragmark_status ragmark_index_save(const ragmark_index* index,
                                              const char* path);
RAGMARK_API ragmark_status ragmark_index_load(const char* path, ragmark_index** out);
RAGMARK_API size_t ragmark_index_chunk_count(const ragmark_index* index);

typedef struct ragmark_retrieval {
  uint32_t* chunk_ids;
  double* scores;
  size_t count;
  char* context; /* retrieved chunk texts joined with newlines */
} ragmark_retrieval;

RAGMARK_API ragmark_status ragmark_index_retrieve(const ragmark_index* index,
                                                  const char* query, size_t k,
                                                  ragmark_retrieval* out);
RAGMARK_API void ragmark_retrieval_free(ragmark_retrieval* retrieval);
RAGMARK_API void ragmark_index_free(ragmark_index* index);

/* ------------------------------------------------------------------ */
/* Corpus relevance analysis                                           */

typedef struct ragmark_termset ragmark_termset;
typedef struct ragmark_wordvecs ragmark_wordvecs;

RAGMARK_API ragmark_status ragmark_termset_load(const char* path, ragmark_termset** out);
RAGMARK_API size_t ragmark_termset_size(const ragmark_termset* terms);
RAGMARK_API void ragmark_termset_free(ragmark_termset* terms);

RAGMARK_API ragmark_status ragmark_wordvecs_load(const char* path, ragmark_wordvecs** out);
RAGMARK_API void ragmark_wordvecs_free(ragmark_wordvecs* vectors);

/* One CSV row per corpus: terminology matches, overlap %, vector proximity
 * (blank without a table), and corpus statistics. `vectors` may be NULL. */
RAGMARK_API ragmark_status ragmark_relevance_csv(const ragmark_corpus* const* corpora,
                                                 size_t corpus_count,
                                                 const ragmark_termset* terms,
                                                 const ragmark_wordvecs* vectors,
                                                 char** out_csv);

/* Scaled dot-product attention scores: out[i*m + j] = Q_i . K_j / sqrt(d_k).
 * `queries` is n x dim row-major, `keys` is m x dim row-major. */
RAGMARK_API ragmark_status ragmark_attention_scores(const double* queries, size_t n,
                                                    const double* keys, size_t m,
                                                    size_t dim, size_t d_k,
                                                    double* out_scores);

/* ------------------------------------------------------------------ */
/* Answer extraction                                                   */

typedef struct ragmark_ruleset ragmark_ruleset;

RAGMARK_API ragmark_status ragmark_ruleset_default(ragmark_ruleset** out);
RAGMARK_API ragmark_status ragmark_ruleset_load(const char* path, ragmark_ruleset** out);
RAGMARK_API void ragmark_ruleset_free(ragmark_ruleset* rules);

/* letter_out receives 'A'..'E', or '\0' when no rule matches. */
RAGMARK_API ragmark_status ragmark_extract_choice(const ragmark_ruleset* rules,
                                                  const char* output, char* letter_out);

/* Runs a JSON Lines corpus of {"output","expected"} cases. out_report
 * (optional) receives a human-readable summary including any failures. */
RAGMARK_API ragmark_status ragmark_extraction_regression(const ragmark_ruleset* rules,
                                                         const char* corpus_path,
                                                         size_t* passed, size_t* total,
                                                         char** out_report);

/* ------------------------------------------------------------------ */
/* Statistics                                                          */

RAGMARK_API ragmark_status ragmark_mean_sem(const double* values, size_t n,
                                            double* mean, double* sem);

/* `values` holds the groups back to back; group_sizes gives each length. */
RAGMARK_API ragmark_status ragmark_one_way_anova(const double* values,
                                                 const size_t* group_sizes,
                                                 size_t group_count, double* f_stat,
                                                 double* p_value,
                                                 uint64_t* df_between,
                                                 uint64_t* df_within);

RAGMARK_API ragmark_status ragmark_welch_t_test(const double* a, size_t na,
                                                const double* b, size_t nb,
                                                double* t, double* df, double* p);

/* Dunnett many-to-one comparisons; the first group is the control.
 * adjusted_p must hold group_count - 1 doubles. */
RAGMARK_API ragmark_status ragmark_dunnett(const double* values,
                                           const size_t* group_sizes,
                                           size_t group_count, double* adjusted_p);

/* ------------------------------------------------------------------ */
/* Experiment runner                                                   */

typedef struct ragmark_config ragmark_config;

RAGMARK_API ragmark_status ragmark_config_load(const char* path, ragmark_config** out);
RAGMARK_API ragmark_status ragmark_config_set_seed(ragmark_config* config, uint64_t seed);
RAGMARK_API ragmark_status ragmark_config_set_parallelism(ragmark_config* config,
                                                          size_t parallelism);
RAGMARK_API ragmark_status ragmark_config_set_log_raw(ragmark_config* config,
                                                      int log_raw);
RAGMARK_API void ragmark_config_free(ragmark_config* config);

typedef void (*ragmark_progress_fn)(const char* message, void* user_data);

RAGMARK_API ragmark_status ragmark_run_experiment(const ragmark_config* config,
                                                  ragmark_progress_fn progress,
                                                  void* user_data);

/* out_dir may be NULL to write the report next to the records. */
RAGMARK_API ragmark_status ragmark_write_report(const char* run_dir,
                                                const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* RAGMARK_H */
