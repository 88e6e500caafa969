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

#include <map>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/sha256.hpp"
#include "synthetic.hpp"
#include "test_helpers.hpp"

using namespace ragmark;
using ragmark::testing::TempDir;
using ragmark::testing::make_synthetic_experiment;
using ragmark::testing::read_file;
using ragmark::testing::write_file;

TEST_CASE("mcq loading validates the schema") {
  TempDir dir("mcq");
  write_file(dir.file("good.jsonl"),
             R"({"id":"q1","category":"alpha","case":"c","question":"q?","options":{"A":"x","B":"y"},"gold":"A"})"
             "\n");
  auto items = load_mcq_file(dir.file("good.jsonl"), {"alpha"});
  REQUIRE(items.size() == 1);
  CHECK(items[0].gold == 'A');
  CHECK(items[0].options.at('B') == "y");

  write_file(dir.file("badgold.jsonl"),
             R"({"id":"q1","category":"alpha","case":"c","question":"q?","options":{"A":"x","B":"y"},"gold":"E"})"
             "\n");
  CHECK_THROWS_AS(load_mcq_file(dir.file("badgold.jsonl"), {"alpha"}), Error);

  write_file(dir.file("gap.jsonl"),
             R"({"id":"q1","category":"alpha","case":"c","question":"q?","options":{"A":"x","C":"y"},"gold":"A"})"
             "\n");
  CHECK_THROWS_AS(load_mcq_file(dir.file("gap.jsonl"), {"alpha"}), Error);

  write_file(dir.file("dup.jsonl"),
             R"({"id":"q1","category":"alpha","case":"c","question":"q?","options":{"A":"x","B":"y"},"gold":"A"})"
             "\n"
             R"({"id":"q1","category":"alpha","case":"c","question":"q?","options":{"A":"x","B":"y"},"gold":"B"})"
             "\n");
  CHECK_THROWS_AS(load_mcq_file(dir.file("dup.jsonl"), {"alpha"}), Error);

  write_file(dir.file("cat.jsonl"),
             R"({"id":"q1","category":"mystery","case":"c","question":"q?","options":{"A":"x","B":"y"},"gold":"A"})"
             "\n");
  CHECK_THROWS_AS(load_mcq_file(dir.file("cat.jsonl"), {"alpha"}), Error);
}

TEST_CASE("config validation lists every problem at once") {
  ExperimentConfig config;  // missing nearly everything
  config.trials = 0;
  config.k = 0;
  config.parallelism = 0;
  try {
    validate_config(config);
    CHECK(false);
  } catch (const Error& e) {
    std::string message = e.what();
    CHECK(message.find("mcq_path") != std::string::npos);
    CHECK(message.find("output_dir") != std::string::npos);
    CHECK(message.find("trials") != std::string::npos);
    CHECK(message.find("k must") != std::string::npos);
    CHECK(message.find("parallelism") != std::string::npos);
    CHECK(message.find("base_url") != std::string::npos);
  }
}

TEST_CASE("config load honors defaults and overrides") {
  TempDir dir("config");
  write_file(dir.file("mcq.jsonl"), "{}");
  write_file(dir.file("config.json"), R"({
    "mcq_path": "mcq.jsonl",
    "output_dir": "out",
    "endpoint": {"base_url": "mock:uniform"},
    "seed": 99
  })");
  ExperimentConfig config = load_experiment_config(dir.file("config.json"));
  CHECK(config.trials == 4);
  CHECK(config.k == 3);
  CHECK(config.chunk_size == 1000);
  CHECK(config.seed == 99);
  CHECK(config.categories == default_categories());
  CHECK(config.mcq_path == dir.file("mcq.jsonl"));  // relative to the config file
  CHECK(config.endpoint.base_url == "mock:uniform");

  write_file(dir.file("badmode.json"), R"({
    "mcq_path": "mcq.jsonl", "output_dir": "out",
    "endpoint": {"base_url": "mock:banana"}
  })");
  ExperimentConfig bad = load_experiment_config(dir.file("badmode.json"));
  CHECK_THROWS_AS(validate_config(bad), Error);

  write_file(dir.file("badquery.json"), R"({
    "mcq_path": "mcq.jsonl", "output_dir": "out",
    "endpoint": {"base_url": "mock:uniform"}, "retrieval_query": "sideways"
  })");
  CHECK_THROWS_AS(load_experiment_config(dir.file("badquery.json")), Error);
}

TEST_CASE("default categories match the configured subspecialty count") {
  CHECK(default_categories().size() == 11);
}

TEST_CASE("trial record JSON round trip") {
  TrialRecord record;
  record.question_id = "q7";
  record.condition_name = "relevant";
  record.trial_index = 3;
  record.retrieved_chunk_ids = {4, 0, 9};
  record.prompt = "Question: x\nA. a\nB. b\nAnswer:";
  record.raw_output = "The answer is A.";
  record.extracted = 'A';
  record.correct = true;
  record.timestamp = "";

  TrialRecord parsed = record_from_json_line(record_to_json_line(record));
  CHECK(parsed.question_id == record.question_id);
  CHECK(parsed.condition_name == record.condition_name);
  CHECK(parsed.trial_index == record.trial_index);
  CHECK(parsed.retrieved_chunk_ids == record.retrieved_chunk_ids);
  CHECK(parsed.prompt == record.prompt);
  CHECK(parsed.extracted == record.extracted);
  CHECK(parsed.correct == record.correct);
  CHECK(parsed.error.empty());

  TrialRecord unparsed;
  unparsed.question_id = "q1";
  unparsed.condition_name = "Baseline";
  unparsed.error = "endpoint failed";
  TrialRecord parsed2 = record_from_json_line(record_to_json_line(unparsed));
  CHECK_FALSE(parsed2.extracted.has_value());
  CHECK(parsed2.error == "endpoint failed");

  CHECK_THROWS_AS(record_from_json_line("not json"), Error);
  CHECK_THROWS_AS(record_from_json_line("{\"question_id\": 5}"), Error);
}

TEST_CASE("baseline condition skips retrieval") {
  TempDir dir("exp");
  auto experiment = make_synthetic_experiment(dir.path(), 10);
  Condition baseline{"Baseline", std::nullopt, 3};
  std::vector<TrialRecord> records;
  run_condition(experiment.config, experiment.mcqs, baseline, nullptr, 1,
                RuleSet::defaults(),
                [&records](const TrialRecord& r) { records.push_back(r); });
  REQUIRE(records.size() == 10);
  for (const TrialRecord& record : records) {
    CHECK(record.retrieved_chunk_ids.empty());
    CHECK(record.prompt.rfind("Question:", 0) == 0);
    CHECK(record.timestamp.empty());  // mock backend
    CHECK(record.error.empty());
  }
}

TEST_CASE("context-aware mock over a gold-bearing corpus is always correct") {
  TempDir dir("exp");
  auto experiment = make_synthetic_experiment(dir.path(), 12);
  Corpus corpus = load_corpus(experiment.config.corpora.at("relevant"), "relevant");
  ChunkIndex index = ChunkIndex::build(corpus, experiment.config.chunk_size);
  Condition relevant{"relevant", "relevant", 3};
  std::size_t correct = 0;
  run_condition(experiment.config, experiment.mcqs, relevant, &index, 1,
                RuleSet::defaults(), [&correct](const TrialRecord& r) {
                  if (r.correct) ++correct;
                });
  CHECK(correct == 12);
}

TEST_CASE("run_experiment writes conditions x trials files plus a manifest") {
  TempDir dir("exp");
  auto experiment = make_synthetic_experiment(dir.path(), 8);
  experiment.config.trials = 4;
  RunSummary summary = run_experiment(experiment.config);
  CHECK(summary.files_written == 12);  // 3 conditions x 4 trials
  CHECK(summary.files_skipped == 0);
  CHECK(std::filesystem::exists(experiment.config.output_dir / "manifest.json"));
  CHECK(std::filesystem::exists(experiment.config.output_dir / "Baseline.trial1.jsonl"));
  CHECK(std::filesystem::exists(experiment.config.output_dir / "relevant.trial4.jsonl"));

  RunManifest manifest = read_manifest(experiment.config.output_dir);
  CHECK(manifest.conditions ==
        std::vector<std::string>{"Baseline", "random_words", "relevant"});
  CHECK(manifest.questions.size() == 8);
  CHECK(manifest.files.size() == 12);
}

TEST_CASE("mock runs are byte-identical when repeated") {
  TempDir dir("exp");
  auto experiment = make_synthetic_experiment(dir.path(), 6);
  experiment.config.trials = 2;

  experiment.config.output_dir = dir.file("run_a");
  run_experiment(experiment.config);
  experiment.config.output_dir = dir.file("run_b");
  run_experiment(experiment.config);

  for (const char* name : {"Baseline.trial1.jsonl", "Baseline.trial2.jsonl",
                           "relevant.trial1.jsonl", "random_words.trial2.jsonl"}) {
    CHECK(read_file(dir.file("run_a") / name) == read_file(dir.file("run_b") / name));
    CHECK(!read_file(dir.file("run_a") / name).empty());
  }
}

TEST_CASE("parallel execution preserves record order and bytes") {
  TempDir dir("exp");
  auto experiment = make_synthetic_experiment(dir.path(), 16);
  experiment.config.trials = 1;

  experiment.config.output_dir = dir.file("serial");
  experiment.config.parallelism = 1;
  run_experiment(experiment.config);

  experiment.config.output_dir = dir.file("parallel");
  experiment.config.parallelism = 4;
  run_experiment(experiment.config);

  for (const char* name :
       {"Baseline.trial1.jsonl", "relevant.trial1.jsonl", "random_words.trial1.jsonl"}) {
    CHECK(read_file(dir.file("serial") / name) == read_file(dir.file("parallel") / name));
  }
}

TEST_CASE("resume regenerates only missing files") {
  TempDir dir("exp");
  auto experiment = make_synthetic_experiment(dir.path(), 5);
  experiment.config.trials = 2;
  run_experiment(experiment.config);

  auto victim = experiment.config.output_dir / "relevant.trial2.jsonl";
  std::string original = read_file(victim);
  std::filesystem::remove(victim);

  RunSummary resumed = run_experiment(experiment.config);
  CHECK(resumed.files_written == 1);
  CHECK(resumed.files_skipped == 5);
  CHECK(read_file(victim) == original);
}

TEST_CASE("resume rejects a different config in the same output dir") {
  TempDir dir("exp");
  auto experiment = make_synthetic_experiment(dir.path(), 4);
  experiment.config.trials = 1;
  run_experiment(experiment.config);

  experiment.config.seed += 1;  // fingerprint changes
  CHECK_THROWS_AS(run_experiment(experiment.config), Error);
}

TEST_CASE("load_records verifies checksums and question coverage") {
  TempDir dir("exp");
  auto experiment = make_synthetic_experiment(dir.path(), 5);
  experiment.config.trials = 2;
  run_experiment(experiment.config);

  LoadedRun run = load_records(experiment.config.output_dir);
  CHECK(run.groups.size() == 6);
  for (const auto& [key, records] : run.groups) {
    CHECK(records.size() == 5);
  }

  // single flipped byte is detected and the file is named
  auto victim = experiment.config.output_dir / "Baseline.trial1.jsonl";
  std::string bytes = read_file(victim);
  bytes[bytes.size() / 2] ^= 0x01;
  write_file(victim, bytes);
  try {
    load_records(experiment.config.output_dir);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("Baseline.trial1.jsonl") != std::string::npos);
  }
}

TEST_CASE("load_records rejects unknown and duplicate question ids") {
  TempDir dir("exp");
  auto experiment = make_synthetic_experiment(dir.path(), 3);
  experiment.config.trials = 1;
  run_experiment(experiment.config);

  auto victim = experiment.config.output_dir / "Baseline.trial1.jsonl";
  std::string bytes = read_file(victim);

  // swap a known id for an unknown one and fix up the manifest checksum
  std::string tampered = bytes;
  auto at = tampered.find("\"q1\"");
  REQUIRE(at != std::string::npos);
  tampered.replace(at, 4, "\"qX\"");
  write_file(victim, tampered);
  RunManifest manifest = read_manifest(experiment.config.output_dir);
  manifest.files["Baseline.trial1.jsonl"].sha256 = Sha256::hex_digest(tampered);
  write_manifest(experiment.config.output_dir, manifest);
  CHECK_THROWS_AS(load_records(experiment.config.output_dir), Error);
}

TEST_CASE("max_context_chars caps the assembled context") {
  TempDir dir("exp");
  auto experiment = make_synthetic_experiment(dir.path(), 8);
  Corpus corpus = load_corpus(experiment.config.corpora.at("relevant"), "relevant");
  ChunkIndex index = ChunkIndex::build(corpus, experiment.config.chunk_size);
  Condition relevant{"relevant", "relevant", 3};

  experiment.config.max_context_chars = 10;  // far too small to keep gold texts
  std::size_t correct = 0;
  run_condition(experiment.config, experiment.mcqs, relevant, &index, 1,
                RuleSet::defaults(), [&correct](const TrialRecord& r) {
                  auto question_at = r.prompt.find("\nQuestion:");
                  REQUIRE(r.prompt.rfind("Context: ", 0) == 0);
                  REQUIRE(question_at != std::string::npos);
                  CHECK(question_at - 9 <= 10);  // capped context segment
                  if (r.correct) ++correct;
                });
  CHECK(correct < 8);  // uncapped, the gold-bearing corpus scores 8/8
}

TEST_CASE("endpoint failures are recorded and the run continues") {
  TempDir dir("exp");
  auto experiment = make_synthetic_experiment(dir.path(), 4);
  experiment.config.endpoint.base_url = "http://127.0.0.1:9/v1";  // unreachable
  experiment.config.endpoint.max_retries = 0;
  experiment.config.endpoint.timeout_seconds = 0.2;
  experiment.config.endpoint.backoff_base_seconds = 0.001;

  Condition baseline{"Baseline", std::nullopt, 3};
  std::vector<TrialRecord> records;
  run_condition(experiment.config, experiment.mcqs, baseline, nullptr, 1,
                RuleSet::defaults(),
                [&records](const TrialRecord& r) { records.push_back(r); });
  REQUIRE(records.size() == 4);
  for (const TrialRecord& record : records) {
    CHECK_FALSE(record.error.empty());
    CHECK_FALSE(record.extracted.has_value());
    CHECK_FALSE(record.correct);
    CHECK(record.raw_output.empty());
  }
}

TEST_CASE("trial seeds differ across trials") {
  CHECK(trial_seed(1, 1) != trial_seed(1, 2));
  CHECK(trial_seed(1, 1) != trial_seed(2, 1));
  CHECK(trial_seed(5, 3) == trial_seed(5, 3));
}
