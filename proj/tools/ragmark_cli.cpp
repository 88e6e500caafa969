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

// Command-line front end over the ragmark C API.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ragmark.h"

namespace {

int fail(const char* what) {
  std::fprintf(stderr, "ragmark: %s: %s\n", what, ragmark_last_error());
  return 1;
}

void print_progress(const char* message, void*) {
  std::printf("%s\n", message);
  std::fflush(stdout);
}

struct CorpusSpec {
  std::string name;
  std::string path;
};

bool parse_corpus_spec(const std::string& arg, CorpusSpec& out) {
  std::size_t eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) return false;
  out.name = arg.substr(0, eq);
  out.path = arg.substr(eq + 1);
  return true;
}

int cmd_gen_random(std::uint64_t words, std::uint64_t seed, double mean_length,
                   const std::string& name, const std::string& out_path) {
  ragmark_corpus* corpus = nullptr;
  if (ragmark_corpus_generate_random(words, seed, mean_length, name.c_str(), &corpus) !=
      RAGMARK_OK) {
    return fail("gen-random");
  }
  std::unique_ptr<ragmark_corpus, decltype(&ragmark_corpus_free)> guard(
      corpus, ragmark_corpus_free);
  if (ragmark_corpus_save(corpus, out_path.c_str()) != RAGMARK_OK) {
    return fail("gen-random");
  }
  std::printf("wrote %llu words to %s\n", static_cast<unsigned long long>(words),
              out_path.c_str());
  return 0;
}

int cmd_index(const std::string& corpus_path, const std::string& name,
              std::size_t chunk_size, const std::string& out_path,
              const std::string& probe_query, std::size_t k) {
  ragmark_corpus* corpus = nullptr;
  if (ragmark_corpus_load(corpus_path.c_str(), name.c_str(), &corpus) != RAGMARK_OK) {
    return fail("index");
  }
  std::unique_ptr<ragmark_corpus, decltype(&ragmark_corpus_free)> corpus_guard(
      corpus, ragmark_corpus_free);

  ragmark_index* index = nullptr;
  if (ragmark_index_build(corpus, chunk_size, &index) != RAGMARK_OK) {
    return fail("index");
  }
  std::unique_ptr<ragmark_index, decltype(&ragmark_index_free)> index_guard(
      index, ragmark_index_free);

  if (ragmark_index_save(index, out_path.c_str()) != RAGMARK_OK) {
    return fail("index");
  }
  std::printf("indexed %zu chunks into %s\n", ragmark_index_chunk_count(index),
              out_path.c_str());

  if (!probe_query.empty()) {
    ragmark_retrieval retrieval{};
    if (ragmark_index_retrieve(index, probe_query.c_str(), k, &retrieval) != RAGMARK_OK) {
      return fail("index --probe");
    }
    for (std::size_t i = 0; i < retrieval.count; ++i) {
      std::printf("chunk %u  score %.6f\n", retrieval.chunk_ids[i], retrieval.scores[i]);
    }
    ragmark_retrieval_free(&retrieval);
  }
  return 0;
}

int cmd_analyze(const std::vector<std::string>& corpus_args,
                const std::string& terms_path, const std::string& embeddings_path,
                const std::string& out_path) {
  std::vector<CorpusSpec> specs(corpus_args.size());
  for (std::size_t i = 0; i < corpus_args.size(); ++i) {
    if (!parse_corpus_spec(corpus_args[i], specs[i])) {
      std::fprintf(stderr, "ragmark: analyze: --corpus expects name=path, got '%s'\n",
                   corpus_args[i].c_str());
      return 1;
    }
  }

  ragmark_termset* terms = nullptr;
  if (ragmark_termset_load(terms_path.c_str(), &terms) != RAGMARK_OK) {
    return fail("analyze");
  }
  std::unique_ptr<ragmark_termset, decltype(&ragmark_termset_free)> terms_guard(
      terms, ragmark_termset_free);

  ragmark_wordvecs* vectors = nullptr;
  std::unique_ptr<ragmark_wordvecs, decltype(&ragmark_wordvecs_free)> vectors_guard(
      nullptr, ragmark_wordvecs_free);
  if (!embeddings_path.empty()) {
    if (ragmark_wordvecs_load(embeddings_path.c_str(), &vectors) != RAGMARK_OK) {
      return fail("analyze");
    }
    vectors_guard.reset(vectors);
  }

  std::vector<ragmark_corpus*> corpora;
  std::vector<std::unique_ptr<ragmark_corpus, decltype(&ragmark_corpus_free)>> guards;
  for (const CorpusSpec& spec : specs) {
    ragmark_corpus* corpus = nullptr;
    if (ragmark_corpus_load(spec.path.c_str(), spec.name.c_str(), &corpus) !=
        RAGMARK_OK) {
      return fail("analyze");
    }
    corpora.push_back(corpus);
    guards.emplace_back(corpus, ragmark_corpus_free);
  }

  char* csv = nullptr;
  if (ragmark_relevance_csv(const_cast<const ragmark_corpus* const*>(corpora.data()),
                            corpora.size(), terms, vectors, &csv) != RAGMARK_OK) {
    return fail("analyze");
  }
  std::unique_ptr<char, decltype(&ragmark_string_free)> csv_guard(csv,
                                                                  ragmark_string_free);

  if (out_path.empty()) {
    std::fputs(csv, stdout);
  } else {
    std::FILE* f = std::fopen(out_path.c_str(), "wb");
    if (!f) {
      std::fprintf(stderr, "ragmark: analyze: cannot write %s\n", out_path.c_str());
      return 1;
    }
    std::fputs(csv, f);
    std::fclose(f);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_run(const std::string& config_path, bool seed_set, std::uint64_t seed,
            bool parallelism_set, std::size_t parallelism, bool log_raw) {
  ragmark_config* config = nullptr;
  if (ragmark_config_load(config_path.c_str(), &config) != RAGMARK_OK) {
    return fail("run");
  }
  std::unique_ptr<ragmark_config, decltype(&ragmark_config_free)> guard(
      config, ragmark_config_free);
  if (seed_set) ragmark_config_set_seed(config, seed);
  if (parallelism_set) ragmark_config_set_parallelism(config, parallelism);
  if (log_raw) ragmark_config_set_log_raw(config, 1);

  if (ragmark_run_experiment(config, print_progress, nullptr) != RAGMARK_OK) {
    return fail("run");
  }
  return 0;
}

int cmd_report(const std::string& run_dir, const std::string& out_dir) {
  if (ragmark_write_report(run_dir.c_str(),
                           out_dir.empty() ? nullptr : out_dir.c_str()) != RAGMARK_OK) {
    return fail("report");
  }
  std::printf("report written under %s\n",
              out_dir.empty() ? run_dir.c_str() : out_dir.c_str());
  return 0;
}

int cmd_extract_test(const std::string& corpus_path, const std::string& rules_path) {
  ragmark_ruleset* rules = nullptr;
  ragmark_status status = rules_path.empty()
                              ? ragmark_ruleset_default(&rules)
                              : ragmark_ruleset_load(rules_path.c_str(), &rules);
  if (status != RAGMARK_OK) return fail("extract-test");
  std::unique_ptr<ragmark_ruleset, decltype(&ragmark_ruleset_free)> guard(
      rules, ragmark_ruleset_free);

  std::size_t passed = 0, total = 0;
  char* report = nullptr;
  if (ragmark_extraction_regression(rules, corpus_path.c_str(), &passed, &total,
                                    &report) != RAGMARK_OK) {
    return fail("extract-test");
  }
  std::unique_ptr<char, decltype(&ragmark_string_free)> report_guard(
      report, ragmark_string_free);
  std::fputs(report, stdout);
  return passed == total ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ragmark: RAG experiment harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", []() { return std::string(ragmark_version()); });

  // gen-random
  auto* gen = app.add_subcommand("gen-random", "Generate a seeded random-word corpus");
  std::uint64_t gen_words = 0;
  std::uint64_t gen_seed = 0;
  double gen_mean = 9.55;
  std::string gen_name = "random_words";
  std::string gen_out;
  gen->add_option("--words", gen_words, "Number of words")->required();
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--mean-length", gen_mean, "Mean word length")->capture_default_str();
  gen->add_option("--name", gen_name, "Corpus name")->capture_default_str();
  gen->add_option("--out", gen_out, "Output .txt path")->required();

  // index
  auto* index = app.add_subcommand("index", "Build and persist a retrieval index");
  std::string index_corpus, index_name, index_out, index_probe;
  std::size_t index_chunk_size = 1000;
  std::size_t index_k = 3;
  index->add_option("--corpus", index_corpus, "Corpus .txt path")->required();
  index->add_option("--name", index_name, "Corpus name")->required();
  index->add_option("--chunk-size", index_chunk_size, "Words per chunk")->capture_default_str();
  index->add_option("--out", index_out, "Index file path")->required();
  index->add_option("--probe", index_probe, "Optional query to run after building");
  index->add_option("--k", index_k, "Chunks to retrieve for --probe")->capture_default_str();

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Corpus relevance report (CSV)");
  std::vector<std::string> analyze_corpora;
  std::string analyze_terms, analyze_embeddings, analyze_out;
  analyze->add_option("--corpus", analyze_corpora, "Corpus as name=path (repeatable)")
      ->required();
  analyze->add_option("--terms", analyze_terms, "Term set file (one term per line)")
      ->required();
  analyze->add_option("--embeddings", analyze_embeddings,
                      "Word vector table in plain text format");
  analyze->add_option("--out", analyze_out, "Output CSV path (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "Run the experiment described by a config");
  std::string run_config;
  std::uint64_t run_seed = 0;
  std::size_t run_parallelism = 0;
  bool run_log_raw = false;
  run->add_option("--config", run_config, "Experiment config JSON")->required();
  auto* seed_opt = run->add_option("--seed", run_seed, "Override the config seed");
  auto* par_opt =
      run->add_option("--parallelism", run_parallelism, "Override config parallelism");
  run->add_flag("--log-raw", run_log_raw, "Log raw request/response bodies");

  // report
  auto* report = app.add_subcommand("report", "Render statistics tables for a run");
  std::string report_run, report_out;
  report->add_option("--run", report_run, "Run output directory")->required();
  report->add_option("--out", report_out, "Report directory (default: run directory)");

  // extract-test
  auto* extract =
      app.add_subcommand("extract-test", "Run the answer-extraction regression corpus");
  std::string extract_corpus, extract_rules;
  extract->add_option("--corpus", extract_corpus, "Regression corpus JSONL")->required();
  extract->add_option("--rules", extract_rules,
                      "Rules file (priority<TAB>id<TAB>pattern); default built-ins");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) return cmd_gen_random(gen_words, gen_seed, gen_mean, gen_name, gen_out);
  if (index->parsed()) {
    return cmd_index(index_corpus, index_name, index_chunk_size, index_out, index_probe,
                     index_k);
  }
  if (analyze->parsed()) {
    return cmd_analyze(analyze_corpora, analyze_terms, analyze_embeddings, analyze_out);
  }
  if (run->parsed()) {
    return cmd_run(run_config, seed_opt->count() > 0, run_seed, par_opt->count() > 0,
                   run_parallelism, run_log_raw);
  }
  if (report->parsed()) return cmd_report(report_run, report_out);
  if (extract->parsed()) return cmd_extract_test(extract_corpus, extract_rules);
  return 0;
}
