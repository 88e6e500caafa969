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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/corpus.hpp"
#include "core/extraction.hpp"
#include "core/llm_client.hpp"
#include "core/tfidf.hpp"

namespace ragmark {

struct McqItem {
  std::string id;
  std::string category;
  std::string case_text;  // patient background; doubles as the retrieval query
  std::string question;
  std::map<char, std::string> options;
  char gold = 'A';
};

const std::vector<std::string>& default_categories();

// JSON Lines, one object per question:
// {"id","category","case","question","options":{"A":...},"gold"}
std::vector<McqItem> load_mcq_file(const std::filesystem::path& path,
                                   const std::vector<std::string>& categories);

struct Condition {
  std::string name;
  std::optional<std::string> corpus_name;  // nullopt = Baseline (no retrieval)
  std::size_t k = 3;
};

enum class RetrievalQueryMode { case_only, case_and_question };

struct ExperimentConfig {
  std::filesystem::path mcq_path;
  std::map<std::string, std::filesystem::path> corpora;  // condition name -> txt
  std::filesystem::path term_set_path;                   // optional
  ModelEndpoint endpoint;
  std::size_t trials = 4;
  std::size_t k = 3;
  std::size_t chunk_size = 1000;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  std::filesystem::path output_dir;
  std::vector<std::string> categories = default_categories();
  RetrievalQueryMode retrieval_query = RetrievalQueryMode::case_only;
  std::size_t max_context_chars = 0;  // 0 = unlimited
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Throws a single error listing every problem found.
void validate_config(const ExperimentConfig& config);

// Hash of the canonicalized config, stored in the run manifest so resumed
// runs cannot silently mix configurations.
std::string config_fingerprint(const ExperimentConfig& config);

struct TrialRecord {
  std::string question_id;
  std::string condition_name;
  std::size_t trial_index = 1;  // 1-based
  std::vector<std::uint32_t> retrieved_chunk_ids;
  std::string prompt;
  std::string raw_output;
  std::optional<char> extracted;  // nullopt = Unparsed
  bool correct = false;
  std::string timestamp;  // RFC 3339 UTC; empty under the mock backend
  std::string error;      // endpoint failure marker; empty on success
};

std::string record_to_json_line(const TrialRecord& record);
TrialRecord record_from_json_line(const std::string& line);

std::string record_file_name(const std::string& condition, std::size_t trial);

std::uint64_t trial_seed(std::uint64_t experiment_seed, std::size_t trial);

using RecordSink = std::function<void(const TrialRecord&)>;
using ProgressFn = std::function<void(const std::string&)>;

// Runs one (condition, trial): retrieve -> prompt -> complete -> extract ->
// grade, per question, emitting records in question order. Endpoint failures
// become Unparsed records with an error marker; the run continues.
void run_condition(const ExperimentConfig& config, const std::vector<McqItem>& mcqs,
                   const Condition& condition, const ChunkIndex* index,
                   std::size_t trial, const RuleSet& rules, const RecordSink& sink);

struct ManifestFile {
  std::string sha256;
  std::size_t records = 0;
  bool complete = false;
};

struct RunManifest {
  std::string config_hash;
  std::size_t trials = 0;
  std::vector<std::string> conditions;  // run order, Baseline first
  std::vector<std::pair<std::string, std::string>> questions;  // id, category
  std::map<std::string, ManifestFile> files;
};

RunManifest read_manifest(const std::filesystem::path& output_dir);
void write_manifest(const std::filesystem::path& output_dir, const RunManifest& manifest);

struct RunSummary {
  std::filesystem::path output_dir;
  std::size_t files_written = 0;
  std::size_t files_skipped = 0;
};

// Full experiment: conditions x trials with manifest-based resume. Completed
// (condition, trial) files whose checksums still match are never rewritten.
RunSummary run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

struct LoadedRun {
  RunManifest manifest;
  // (condition, trial) -> records in question order
  std::map<std::pair<std::string, std::size_t>, std::vector<TrialRecord>> groups;
};

// Verifies every record file against the manifest checksums and validates
// that each group covers the question set exactly once.
LoadedRun load_records(const std::filesystem::path& output_dir);

}  // namespace ragmark
