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

#include "core/experiment.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/sha256.hpp"
#include "core/text_util.hpp"

namespace ragmark {

namespace {

using nlohmann::json;

constexpr std::string_view kManifestFormat = "ragmark.run.v1";
constexpr std::string_view kManifestName = "manifest.json";
constexpr std::string_view kBaselineName = "Baseline";

std::string rfc3339_utc_now() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw Error(ErrorCode::io, "read failure: " + path.string());
  }
  return std::move(buffer).str();
}

// Truncates to at most `cap` bytes without splitting a UTF-8 sequence.
std::string cap_context(std::string context, std::size_t cap) {
  if (cap == 0 || context.size() <= cap) return context;
  std::size_t end = cap;
  while (end > 0 && (static_cast<unsigned char>(context[end]) & 0xC0) == 0x80) --end;
  context.resize(end);
  return context;
}

enum class MockMode { none, context_aware, uniform };

MockMode mock_mode(const ModelEndpoint& endpoint) {
  if (!endpoint.is_mock()) return MockMode::none;
  std::string suffix = endpoint.base_url.substr(5);
  if (suffix == "context-aware") return MockMode::context_aware;
  if (suffix == "uniform") return MockMode::uniform;
  throw Error(ErrorCode::validation,
              "mock endpoint must be mock:context-aware or mock:uniform, got " +
                  endpoint.base_url);
}

}  // namespace

const std::vector<std::string>& default_categories() {
  static const std::vector<std::string> kCategories = {
      "Hypertension", "Glomerular Diseases", "AKI",       "Divalent Ions",
      "Transplantation", "CKD",              "ESRD",      "Electrolyte",
      "Pregnancy",        "IR",              "Infection",
  };
  return kCategories;
}

std::vector<McqItem> load_mcq_file(const std::filesystem::path& path,
                                   const std::vector<std::string>& categories) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open MCQ file: " + path.string());
  }
  std::set<std::string> category_set(categories.begin(), categories.end());
  std::set<std::string> seen_ids;
  std::vector<McqItem> items;
  std::vector<std::string> problems;
  auto complain = [&problems](std::size_t line_no, const std::string& what) {
    if (problems.size() < 20) {
      problems.push_back("line " + std::to_string(line_no) + ": " + what);
    }
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json parsed = json::parse(line, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
      complain(line_no, "not a JSON object");
      continue;
    }
    McqItem item;
    bool ok = true;
    for (const char* field : {"id", "category", "case", "question", "gold"}) {
      if (!parsed.contains(field) || !parsed[field].is_string()) {
        complain(line_no, std::string("missing string field '") + field + "'");
        ok = false;
      }
    }
    if (!ok || !parsed.contains("options") || !parsed["options"].is_object()) {
      if (ok) complain(line_no, "missing 'options' object");
      continue;
    }
    item.id = parsed["id"].get<std::string>();
    item.category = parsed["category"].get<std::string>();
    item.case_text = parsed["case"].get<std::string>();
    item.question = parsed["question"].get<std::string>();
    std::string gold = parsed["gold"].get<std::string>();

    for (const auto& [letter, text] : parsed["options"].items()) {
      if (letter.size() != 1 || letter[0] < 'A' || letter[0] > 'E' || !text.is_string()) {
        complain(line_no, "option letters must be single characters A-E");
        ok = false;
        break;
      }
      item.options[letter[0]] = text.get<std::string>();
    }
    if (!ok) continue;
    if (item.options.size() < 2) {
      complain(line_no, "needs at least 2 options");
      continue;
    }
    char expected = 'A';
    for (const auto& [letter, _] : item.options) {
      if (letter != expected) {
        complain(line_no, "option letters must be contiguous from A");
        ok = false;
        break;
      }
      ++expected;
    }
    if (!ok) continue;
    if (gold.size() != 1 || !item.options.count(gold[0])) {
      complain(line_no, "gold letter must name one of the options");
      continue;
    }
    item.gold = gold[0];
    if (item.id.empty() || !seen_ids.insert(item.id).second) {
      complain(line_no, "duplicate or empty question id '" + item.id + "'");
      continue;
    }
    if (item.question.empty()) {
      complain(line_no, "question must be non-empty");
      continue;
    }
    if (!category_set.count(item.category)) {
      complain(line_no, "unknown category '" + item.category + "'");
      continue;
    }
    items.push_back(std::move(item));
  }

  if (!problems.empty()) {
    std::string message = "MCQ file " + path.string() + " is invalid: ";
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (i > 0) message += "; ";
      message += problems[i];
    }
    throw Error(ErrorCode::validation, message);
  }
  if (items.empty()) {
    throw Error(ErrorCode::validation, "MCQ file has no questions: " + path.string());
  }
  return items;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::string bytes = read_file_bytes(path);
  json parsed = json::parse(bytes, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    throw Error(ErrorCode::parse, "config is not a JSON object: " + path.string());
  }

  ExperimentConfig config;
  auto base = path.parent_path();
  auto resolve = [&base](const std::string& p) -> std::filesystem::path {
    std::filesystem::path fp(p);
    return fp.is_absolute() || base.empty() ? fp : base / fp;
  };

  try {
    if (parsed.contains("mcq_path")) config.mcq_path = resolve(parsed.at("mcq_path"));
    if (parsed.contains("term_set_path")) {
      config.term_set_path = resolve(parsed.at("term_set_path"));
    }
    if (parsed.contains("output_dir")) config.output_dir = resolve(parsed.at("output_dir"));
    if (parsed.contains("corpora")) {
      for (const auto& [name, p] : parsed.at("corpora").items()) {
        config.corpora[name] = resolve(p.get<std::string>());
      }
    }
    if (parsed.contains("trials")) config.trials = parsed.at("trials").get<std::size_t>();
    if (parsed.contains("k")) config.k = parsed.at("k").get<std::size_t>();
    if (parsed.contains("chunk_size")) {
      config.chunk_size = parsed.at("chunk_size").get<std::size_t>();
    }
    if (parsed.contains("seed")) config.seed = parsed.at("seed").get<std::uint64_t>();
    if (parsed.contains("parallelism")) {
      config.parallelism = parsed.at("parallelism").get<std::size_t>();
    }
    if (parsed.contains("max_context_chars")) {
      config.max_context_chars = parsed.at("max_context_chars").get<std::size_t>();
    }
    if (parsed.contains("categories")) {
      config.categories = parsed.at("categories").get<std::vector<std::string>>();
    }
    if (parsed.contains("retrieval_query")) {
      std::string mode = parsed.at("retrieval_query").get<std::string>();
      if (mode == "case") {
        config.retrieval_query = RetrievalQueryMode::case_only;
      } else if (mode == "case_question") {
        config.retrieval_query = RetrievalQueryMode::case_and_question;
      } else {
        throw Error(ErrorCode::validation,
                    "retrieval_query must be 'case' or 'case_question', got '" + mode + "'");
      }
    }
    if (parsed.contains("endpoint")) {
      const json& ep = parsed.at("endpoint");
      if (ep.contains("base_url")) config.endpoint.base_url = ep.at("base_url");
      if (ep.contains("model_name")) config.endpoint.model_name = ep.at("model_name");
      if (ep.contains("temperature")) config.endpoint.temperature = ep.at("temperature");
      if (ep.contains("timeout_seconds")) {
        config.endpoint.timeout_seconds = ep.at("timeout_seconds");
      }
      if (ep.contains("max_retries")) config.endpoint.max_retries = ep.at("max_retries");
      if (ep.contains("api_key_env")) config.endpoint.api_key_env = ep.at("api_key_env");
      if (ep.contains("backoff_base_seconds")) {
        config.endpoint.backoff_base_seconds = ep.at("backoff_base_seconds");
      }
    }
    if (parsed.contains("log_raw")) config.endpoint.log_raw = parsed.at("log_raw");
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::parse,
                "config " + path.string() + ": " + e.what());
  }
  return config;
}

void validate_config(const ExperimentConfig& config) {
  std::vector<std::string> problems;

  if (config.mcq_path.empty()) {
    problems.push_back("mcq_path is required");
  } else if (!std::filesystem::exists(config.mcq_path)) {
    problems.push_back("mcq_path does not exist: " + config.mcq_path.string());
  }
  if (config.output_dir.empty()) problems.push_back("output_dir is required");
  for (const auto& [name, path] : config.corpora) {
    if (!is_identifier(name)) {
      problems.push_back("corpus name must match [A-Za-z0-9_.-]+: '" + name + "'");
    }
    if (name == kBaselineName) {
      problems.push_back("corpus name 'Baseline' is reserved for the no-retrieval condition");
    }
    if (!std::filesystem::exists(path)) {
      problems.push_back("corpus path does not exist: " + path.string());
    }
  }
  if (!config.term_set_path.empty() && !std::filesystem::exists(config.term_set_path)) {
    problems.push_back("term_set_path does not exist: " + config.term_set_path.string());
  }
  if (config.trials == 0) problems.push_back("trials must be >= 1");
  if (config.k == 0) problems.push_back("k must be >= 1");
  if (config.chunk_size == 0) problems.push_back("chunk_size must be >= 1");
  if (config.parallelism == 0) problems.push_back("parallelism must be >= 1");
  if (config.endpoint.base_url.empty()) {
    problems.push_back("endpoint.base_url is required");
  } else if (config.endpoint.is_mock()) {
    try {
      mock_mode(config.endpoint);
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  }
  if (config.endpoint.temperature < 0.0) {
    problems.push_back("endpoint.temperature must be >= 0");
  }
  if (config.endpoint.max_retries < 0) {
    problems.push_back("endpoint.max_retries must be >= 0");
  }
  if (config.categories.empty()) problems.push_back("categories must be non-empty");

  if (!problems.empty()) {
    std::string message = "invalid experiment config: ";
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (i > 0) message += "; ";
      message += problems[i];
    }
    throw Error(ErrorCode::validation, message);
  }
}

std::string config_fingerprint(const ExperimentConfig& config) {
  json canonical;
  canonical["mcq_path"] = config.mcq_path.string();
  json corpora = json::object();
  for (const auto& [name, path] : config.corpora) corpora[name] = path.string();
  canonical["corpora"] = corpora;
  canonical["term_set_path"] = config.term_set_path.string();
  canonical["endpoint"] = {
      {"base_url", config.endpoint.base_url},
      {"model_name", config.endpoint.model_name},
      {"temperature", config.endpoint.temperature},
      {"max_retries", config.endpoint.max_retries},
      {"api_key_env", config.endpoint.api_key_env},
  };
  canonical["trials"] = config.trials;
  canonical["k"] = config.k;
  canonical["chunk_size"] = config.chunk_size;
  canonical["seed"] = config.seed;
  canonical["categories"] = config.categories;
  canonical["retrieval_query"] =
      config.retrieval_query == RetrievalQueryMode::case_only ? "case" : "case_question";
  canonical["max_context_chars"] = config.max_context_chars;
  return Sha256::hex_digest(canonical.dump());
}

std::string record_to_json_line(const TrialRecord& record) {
  json j;
  j["question_id"] = record.question_id;
  j["condition_name"] = record.condition_name;
  j["trial_index"] = record.trial_index;
  j["retrieved_chunk_ids"] = record.retrieved_chunk_ids;
  j["prompt"] = record.prompt;
  j["raw_output"] = record.raw_output;
  j["extracted"] = record.extracted ? std::string(1, *record.extracted) : "Unparsed";
  j["correct"] = record.correct;
  j["timestamp"] = record.timestamp;
  if (!record.error.empty()) j["error"] = record.error;
  return j.dump();
}

TrialRecord record_from_json_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::parse, "record line is not a JSON object");
  }
  TrialRecord record;
  try {
    record.question_id = j.at("question_id").get<std::string>();
    record.condition_name = j.at("condition_name").get<std::string>();
    record.trial_index = j.at("trial_index").get<std::size_t>();
    record.retrieved_chunk_ids =
        j.at("retrieved_chunk_ids").get<std::vector<std::uint32_t>>();
    record.prompt = j.at("prompt").get<std::string>();
    record.raw_output = j.at("raw_output").get<std::string>();
    std::string extracted = j.at("extracted").get<std::string>();
    if (extracted.size() == 1 && extracted[0] >= 'A' && extracted[0] <= 'E') {
      record.extracted = extracted[0];
    } else if (extracted != "Unparsed") {
      throw Error(ErrorCode::parse, "bad extracted field: " + extracted);
    }
    record.correct = j.at("correct").get<bool>();
    record.timestamp = j.at("timestamp").get<std::string>();
    if (j.contains("error")) record.error = j.at("error").get<std::string>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::parse, std::string("bad record line: ") + e.what());
  }
  return record;
}

std::string record_file_name(const std::string& condition, std::size_t trial) {
  return condition + ".trial" + std::to_string(trial) + ".jsonl";
}

std::uint64_t trial_seed(std::uint64_t experiment_seed, std::size_t trial) {
  return splitmix64(splitmix64(experiment_seed) + trial);
}

namespace {

struct QuestionRunner {
  const ExperimentConfig& config;
  const Condition& condition;
  const ChunkIndex* index;
  std::size_t trial;
  const RuleSet& rules;
  MockMode mock;
  const ChatClient* client;  // null for mock backends

  TrialRecord run(const McqItem& mcq) const {
    TrialRecord record;
    record.question_id = mcq.id;
    record.condition_name = condition.name;
    record.trial_index = trial;

    try {
      PromptBundle bundle;
      if (index != nullptr) {
        std::string query = mcq.case_text;
        if (config.retrieval_query == RetrievalQueryMode::case_and_question) {
          if (!query.empty()) query += ' ';
          query += mcq.question;
        }
        RetrievalResult retrieved = index->retrieve_top_k(query, condition.k);
        record.retrieved_chunk_ids = retrieved.chunk_ids;
        bundle.context =
            cap_context(std::move(retrieved.context), config.max_context_chars);
      }
      bundle.question = mcq.case_text.empty() ? mcq.question
                                              : mcq.case_text + ' ' + mcq.question;
      bundle.options = mcq.options;
      record.prompt = build_prompt(bundle);

      const std::uint64_t seed = trial_seed(config.seed, trial);
      Completion completion;
      if (mock != MockMode::none) {
        completion = mock_complete(seed, bundle, mcq.gold,
                                   mock == MockMode::context_aware);
        record.timestamp = "";  // keeps mock record files byte-deterministic
      } else {
        completion = client->complete(record.prompt, seed);
        record.timestamp = rfc3339_utc_now();
      }
      record.raw_output = completion.text;
      ExtractedAnswer answer = extract_choice(record.raw_output, rules);
      record.extracted = answer.letter;
      record.correct = grade(answer, mcq.gold);
    } catch (const std::exception& e) {
      record.error = e.what();
      record.raw_output.clear();
      record.extracted = std::nullopt;
      record.correct = false;
      if (mock == MockMode::none) record.timestamp = rfc3339_utc_now();
    } catch (...) {
      record.error = "unknown error";
      record.extracted = std::nullopt;
      record.correct = false;
    }
    return record;
  }
};

}  // namespace

void run_condition(const ExperimentConfig& config, const std::vector<McqItem>& mcqs,
                   const Condition& condition, const ChunkIndex* index,
                   std::size_t trial, const RuleSet& rules, const RecordSink& sink) {
  if (condition.corpus_name.has_value() && index == nullptr) {
    throw Error(ErrorCode::invalid_argument,
                "condition '" + condition.name + "' needs a built index");
  }

  std::optional<ChatClient> client;
  MockMode mock = mock_mode(config.endpoint);
  if (mock == MockMode::none) client.emplace(config.endpoint);

  QuestionRunner runner{config,
                        condition,
                        condition.corpus_name ? index : nullptr,
                        trial,
                        rules,
                        mock,
                        client ? &*client : nullptr};

  const std::size_t n = mcqs.size();
  const std::size_t workers = std::min(config.parallelism, n);
  if (workers <= 1) {
    for (const McqItem& mcq : mcqs) sink(runner.run(mcq));
    return;
  }

  // Workers fill completion slots; records are emitted in question order.
  std::vector<std::optional<TrialRecord>> slots(n);
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> cursor{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t i = cursor.fetch_add(1);
        if (i >= n) break;
        TrialRecord record = runner.run(mcqs[i]);
        {
          std::lock_guard<std::mutex> lock(mutex);
          slots[i] = std::move(record);
        }
        ready.notify_all();
      }
    });
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::unique_lock<std::mutex> lock(mutex);
    ready.wait(lock, [&] { return slots[i].has_value(); });
    TrialRecord record = std::move(*slots[i]);
    slots[i].reset();
    lock.unlock();
    sink(record);
  }
  for (std::thread& t : pool) t.join();
}

RunManifest read_manifest(const std::filesystem::path& output_dir) {
  auto path = output_dir / kManifestName;
  std::string bytes = read_file_bytes(path);
  json parsed = json::parse(bytes, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() ||
      parsed.value("format", "") != kManifestFormat) {
    throw Error(ErrorCode::parse, "bad run manifest: " + path.string());
  }
  RunManifest manifest;
  try {
    manifest.config_hash = parsed.at("config_hash").get<std::string>();
    manifest.trials = parsed.at("trials").get<std::size_t>();
    manifest.conditions = parsed.at("conditions").get<std::vector<std::string>>();
    for (const auto& q : parsed.at("questions")) {
      manifest.questions.emplace_back(q.at("id").get<std::string>(),
                                      q.at("category").get<std::string>());
    }
    for (const auto& [name, entry] : parsed.at("files").items()) {
      ManifestFile file;
      file.sha256 = entry.at("sha256").get<std::string>();
      file.records = entry.at("records").get<std::size_t>();
      file.complete = entry.at("complete").get<bool>();
      manifest.files[name] = file;
    }
  } catch (const std::exception& e) {
    throw Error(ErrorCode::parse,
                "bad run manifest " + path.string() + ": " + e.what());
  }
  return manifest;
}

void write_manifest(const std::filesystem::path& output_dir, const RunManifest& manifest) {
  json j;
  j["format"] = kManifestFormat;
  j["config_hash"] = manifest.config_hash;
  j["trials"] = manifest.trials;
  j["conditions"] = manifest.conditions;
  json questions = json::array();
  for (const auto& [id, category] : manifest.questions) {
    questions.push_back({{"id", id}, {"category", category}});
  }
  j["questions"] = questions;
  json files = json::object();
  for (const auto& [name, file] : manifest.files) {
    files[name] = {{"sha256", file.sha256},
                   {"records", file.records},
                   {"complete", file.complete}};
  }
  j["files"] = files;

  auto final_path = output_dir / kManifestName;
  auto tmp_path = output_dir / (std::string(kManifestName) + ".tmp");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::io, "cannot write manifest: " + tmp_path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
      throw Error(ErrorCode::io, "write failure on manifest: " + tmp_path.string());
    }
  }
  std::filesystem::rename(tmp_path, final_path);
}

RunSummary run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  validate_config(config);
  auto report = [&progress](const std::string& message) {
    if (progress) progress(message);
  };

  std::vector<McqItem> mcqs = load_mcq_file(config.mcq_path, config.categories);
  report("loaded " + std::to_string(mcqs.size()) + " questions from " +
         config.mcq_path.string());

  std::map<std::string, ChunkIndex> indices;
  for (const auto& [name, path] : config.corpora) {
    Corpus corpus = load_corpus(path, name);
    indices.emplace(name, ChunkIndex::build(corpus, config.chunk_size));
    report("indexed corpus '" + name + "': " +
           std::to_string(indices.at(name).chunks().size()) + " chunks");
  }

  std::vector<Condition> conditions;
  conditions.push_back({std::string(kBaselineName), std::nullopt, config.k});
  for (const auto& [name, _] : config.corpora) {
    conditions.push_back({name, name, config.k});
  }

  std::filesystem::create_directories(config.output_dir);
  const std::string fingerprint = config_fingerprint(config);

  RunManifest manifest;
  if (std::filesystem::exists(config.output_dir / kManifestName)) {
    manifest = read_manifest(config.output_dir);
    if (manifest.config_hash != fingerprint) {
      throw Error(ErrorCode::validation,
                  "output_dir holds a run with a different config: " +
                      config.output_dir.string());
    }
  } else {
    manifest.config_hash = fingerprint;
  }
  manifest.trials = config.trials;
  manifest.conditions.clear();
  for (const Condition& c : conditions) manifest.conditions.push_back(c.name);
  manifest.questions.clear();
  for (const McqItem& mcq : mcqs) manifest.questions.emplace_back(mcq.id, mcq.category);

  const RuleSet& rules = RuleSet::defaults();
  RunSummary summary;
  summary.output_dir = config.output_dir;

  for (const Condition& condition : conditions) {
    const ChunkIndex* index =
        condition.corpus_name ? &indices.at(*condition.corpus_name) : nullptr;
    for (std::size_t trial = 1; trial <= config.trials; ++trial) {
      const std::string file_name = record_file_name(condition.name, trial);
      const auto file_path = config.output_dir / file_name;

      auto existing = manifest.files.find(file_name);
      if (existing != manifest.files.end() && existing->second.complete &&
          std::filesystem::exists(file_path) &&
          Sha256::hex_digest(read_file_bytes(file_path)) == existing->second.sha256) {
        ++summary.files_skipped;
        report("skipping completed " + file_name);
        continue;
      }

      report("running " + condition.name + " trial " + std::to_string(trial));
      std::ofstream out(file_path, std::ios::binary | std::ios::trunc);
      if (!out) {
        throw Error(ErrorCode::io, "cannot write record file: " + file_path.string());
      }
      Sha256 hasher;
      std::size_t record_count = 0;
      run_condition(config, mcqs, condition, index, trial, rules,
                    [&](const TrialRecord& record) {
                      std::string line = record_to_json_line(record);
                      line += '\n';
                      hasher.update(line);
                      out << line;
                      out.flush();
                      ++record_count;
                    });
      if (!out) {
        throw Error(ErrorCode::io, "write failure on record file: " + file_path.string());
      }
      out.close();

      ManifestFile entry;
      entry.sha256 = to_hex(hasher.finish());
      entry.records = record_count;
      entry.complete = true;
      manifest.files[file_name] = entry;
      write_manifest(config.output_dir, manifest);
      ++summary.files_written;
    }
  }

  write_manifest(config.output_dir, manifest);
  report("run complete: " + std::to_string(summary.files_written) + " written, " +
         std::to_string(summary.files_skipped) + " skipped");
  return summary;
}

LoadedRun load_records(const std::filesystem::path& output_dir) {
  LoadedRun run;
  run.manifest = read_manifest(output_dir);

  std::set<std::string> known_ids;
  for (const auto& [id, _] : run.manifest.questions) known_ids.insert(id);

  for (const auto& [file_name, entry] : run.manifest.files) {
    const auto path = output_dir / file_name;
    std::string bytes = read_file_bytes(path);
    if (Sha256::hex_digest(bytes) != entry.sha256) {
      throw Error(ErrorCode::validation, "checksum mismatch for record file: " + file_name);
    }

    std::vector<TrialRecord> records;
    std::set<std::string> seen;
    std::istringstream lines(bytes);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      TrialRecord record = record_from_json_line(line);
      if (record_file_name(record.condition_name, record.trial_index) != file_name) {
        throw Error(ErrorCode::validation,
                    "record file " + file_name + " holds a record for " +
                        record.condition_name + " trial " +
                        std::to_string(record.trial_index));
      }
      if (!known_ids.count(record.question_id)) {
        throw Error(ErrorCode::validation, "record file " + file_name +
                                               " references unknown question id '" +
                                               record.question_id + "'");
      }
      if (!seen.insert(record.question_id).second) {
        throw Error(ErrorCode::validation, "record file " + file_name +
                                               " repeats question id '" +
                                               record.question_id + "'");
      }
      records.push_back(std::move(record));
    }
    if (records.size() != run.manifest.questions.size()) {
      throw Error(ErrorCode::validation,
                  "record file " + file_name + " has " + std::to_string(records.size()) +
                      " records, expected " + std::to_string(run.manifest.questions.size()));
    }
    if (records.empty()) continue;
    run.groups.emplace(std::make_pair(records.front().condition_name,
                                      records.front().trial_index),
                       std::move(records));
  }
  return run;
}

}  // namespace ragmark
