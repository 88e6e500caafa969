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

#include "core/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "json.hpp"

#include "core/error.hpp"

namespace ragmark {

namespace {

std::regex compile_pattern(const std::string& pattern, const std::string& rule_id) {
  std::regex compiled;
  try {
    compiled.assign(pattern, std::regex::ECMAScript | std::regex::icase |
                                 std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::invalid_argument,
                "rule '" + rule_id + "': invalid pattern: " + e.what());
  }
  if (compiled.mark_count() != 1) {
    throw Error(ErrorCode::invalid_argument,
                "rule '" + rule_id + "': pattern must capture exactly one letter group");
  }
  return compiled;
}

std::string letter_or_unparsed(const std::optional<char>& letter) {
  return letter ? std::string(1, *letter) : std::string("Unparsed");
}

}  // namespace

RuleSet RuleSet::from_rules(
    const std::vector<std::tuple<int, std::string, std::string>>& rules) {
  if (rules.empty()) {
    throw Error(ErrorCode::invalid_argument, "rule set must contain at least one rule");
  }
  RuleSet set;
  std::set<int> priorities;
  for (const auto& [priority, rule_id, pattern] : rules) {
    if (!priorities.insert(priority).second) {
      throw Error(ErrorCode::invalid_argument,
                  "duplicate rule priority " + std::to_string(priority) +
                      " (rule '" + rule_id + "'); priorities must be a strict order");
    }
    ExtractionRule rule;
    rule.priority = priority;
    rule.rule_id = rule_id;
    rule.pattern = pattern;
    rule.compiled = compile_pattern(pattern, rule_id);
    set.rules_.push_back(std::move(rule));
  }
  std::sort(set.rules_.begin(), set.rules_.end(),
            [](const ExtractionRule& a, const ExtractionRule& b) {
              return a.priority < b.priority;
            });
  return set;
}

const RuleSet& RuleSet::defaults() {
  static const RuleSet set = RuleSet::from_rules({
      {10, "answer_is",
       R"(\banswer\s+is[\s:\-]*(?:most\s+likely\s+|likely\s+|probably\s+)?[\(\["'*]*([A-E])\b)"},
      {15, "correct_is", R"(\bcorrect\s+(?:answer|option|choice)\s+is[\s:\-]*[\(\["'*]*([A-E])\b)"},
      {20, "answer_colon", R"(\banswer\s*[:\-][\s\(\["'*]*([A-E])\b)"},
      {30, "paren_leading", R"(^[\s>#*]*\(([A-E])\))"},
      {40, "letter_leading", R"(^[\s>#*]*([A-E])[\s*]*[.):](?=\s|$))"},
      {50, "choice_is", R"(\b(?:option|choice)\s+is[\s:\-]*[\(\["'*]*([A-E])\b)"},
      {55, "option_mention", R"(\boption\s+[\(\["'*]*([A-E])\b)"},
      {60, "choice_mention", R"(\bchoice\s+[\(\["'*]*([A-E])\b)"},
      {70, "select_verb", R"(\b(?:choose|select|pick|go\s+with)\s+(?:option\s+|choice\s+|answer\s+)?[\(\["'*]*([A-E])\b)"},
      {80, "is_correct", R"(\(?\b([A-E])\b\)?\s+is\s+(?:the\s+)?correct\b)"},
  });
  return set;
}

RuleSet RuleSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open rules file: " + path.string());
  }
  std::vector<std::tuple<int, std::string, std::string>> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab1 = line.find('\t');
    std::size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                                 : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos) {
      throw Error(ErrorCode::parse,
                  "rules file " + path.string() + ": line " + std::to_string(line_no) +
                      " is not 'priority<TAB>rule_id<TAB>pattern'");
    }
    int priority;
    try {
      priority = std::stoi(line.substr(0, tab1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse, "rules file " + path.string() + ": bad priority on line " +
                                        std::to_string(line_no));
    }
    std::string rule_id = line.substr(tab1 + 1, tab2 - tab1 - 1);
    std::string pattern = line.substr(tab2 + 1);
    if (rule_id.empty() || pattern.empty()) {
      throw Error(ErrorCode::parse, "rules file " + path.string() + ": empty field on line " +
                                        std::to_string(line_no));
    }
    rules.emplace_back(priority, std::move(rule_id), std::move(pattern));
  }
  return from_rules(rules);
}

ExtractedAnswer extract_choice(const std::string& output, const RuleSet& rules) {
  if (rules.rules().empty()) {
    throw Error(ErrorCode::invalid_argument, "rule set is empty");
  }
  for (const ExtractionRule& rule : rules.rules()) {
    std::smatch match;
    if (!std::regex_search(output, match, rule.compiled)) continue;
    char letter = match[1].str()[0];
    if (letter >= 'a' && letter <= 'e') letter = static_cast<char>(letter - 'a' + 'A');
    ExtractedAnswer answer;
    answer.letter = letter;
    answer.rule_id = rule.rule_id;
    auto begin = static_cast<std::size_t>(match.position(0));
    answer.matched_span = {begin, begin + static_cast<std::size_t>(match.length(0))};
    return answer;
  }
  return {};
}

bool grade(const ExtractedAnswer& extracted, char gold) {
  if (gold < 'A' || gold > 'E') {
    throw Error(ErrorCode::invalid_argument, std::string("gold letter out of range: ") + gold);
  }
  return extracted.letter.has_value() && *extracted.letter == gold;
}

std::vector<RegressionCase> load_regression_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open regression corpus: " + path.string());
  }
  std::vector<RegressionCase> cases;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json parsed = nlohmann::json::parse(line, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("output") ||
        !parsed["output"].is_string() || !parsed.contains("expected") ||
        !parsed["expected"].is_string()) {
      throw Error(ErrorCode::parse, "regression corpus " + path.string() + ": bad line " +
                                        std::to_string(line_no));
    }
    RegressionCase c;
    c.output = parsed["output"].get<std::string>();
    std::string expected = parsed["expected"].get<std::string>();
    if (expected.size() == 1 && expected[0] >= 'A' && expected[0] <= 'E') {
      c.expected = expected[0];
    } else {
      std::string folded;
      for (char ch : expected) folded.push_back(static_cast<char>(std::tolower(
          static_cast<unsigned char>(ch))));
      if (folded != "unparsed") {
        throw Error(ErrorCode::parse,
                    "regression corpus " + path.string() + ": line " +
                        std::to_string(line_no) + ": expected must be A-E or 'unparsed'");
      }
    }
    cases.push_back(std::move(c));
  }
  if (cases.empty()) {
    throw Error(ErrorCode::validation, "regression corpus is empty: " + path.string());
  }
  return cases;
}

RegressionOutcome run_extraction_regression(const std::vector<RegressionCase>& cases,
                                            const RuleSet& rules) {
  RegressionOutcome outcome;
  outcome.total = cases.size();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    ExtractedAnswer answer = extract_choice(cases[i].output, rules);
    if (answer.letter == cases[i].expected) {
      ++outcome.passed;
    } else {
      outcome.failures.push_back({i + 1, cases[i].output,
                                  letter_or_unparsed(cases[i].expected),
                                  letter_or_unparsed(answer.letter)});
    }
  }
  return outcome;
}

}  // namespace ragmark
