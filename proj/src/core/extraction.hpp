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
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace ragmark {

struct ExtractionRule {
  int priority = 0;     // lower fires first; unique within a rule set
  std::string rule_id;
  std::string pattern;  // case-insensitive ECMAScript regex, one capture group
  std::regex compiled;
};

class RuleSet {
 public:
  // Built-in rules reconstructed from the usual model-output shapes:
  // explicit "answer is X" declarations first, then leading-position
  // letters, then loose in-text mentions.
  static const RuleSet& defaults();

  // Line-oriented file: priority<TAB>rule_id<TAB>pattern.
  // Blank lines and lines starting with '#' are skipped.
  static RuleSet load(const std::filesystem::path& path);

  static RuleSet from_rules(
      const std::vector<std::tuple<int, std::string, std::string>>& rules);

  const std::vector<ExtractionRule>& rules() const { return rules_; }

 private:
  std::vector<ExtractionRule> rules_;  // sorted by priority
};

struct ExtractedAnswer {
  std::optional<char> letter;  // 'A'..'E'; nullopt = Unparsed
  std::optional<std::string> rule_id;
  std::optional<std::pair<std::size_t, std::size_t>> matched_span;  // [begin, end)

  bool unparsed() const { return !letter.has_value(); }
};

// Total and deterministic: every input yields exactly one verdict.
ExtractedAnswer extract_choice(const std::string& output, const RuleSet& rules);

// True iff the extracted letter equals gold; Unparsed grades false.
bool grade(const ExtractedAnswer& extracted, char gold);

struct RegressionCase {
  std::string output;
  std::optional<char> expected;  // nullopt = expected Unparsed
};

struct RegressionFailure {
  std::size_t line = 0;
  std::string output;
  std::string expected;
  std::string actual;
};

struct RegressionOutcome {
  std::size_t total = 0;
  std::size_t passed = 0;
  std::vector<RegressionFailure> failures;

  bool all_passed() const { return passed == total && total > 0; }
};

// JSON Lines: {"output": "...", "expected": "B"} ("unparsed" for no letter).
std::vector<RegressionCase> load_regression_corpus(const std::filesystem::path& path);

RegressionOutcome run_extraction_regression(const std::vector<RegressionCase>& cases,
                                            const RuleSet& rules);

}  // namespace ragmark
