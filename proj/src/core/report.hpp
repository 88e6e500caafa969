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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "core/experiment.hpp"
#include "core/stats.hpp"

namespace ragmark {

struct AccuracyBreakdown {
  std::vector<GroupSample> overall;  // run condition order, Baseline first
  std::vector<std::string> categories;  // first-appearance order
  std::map<std::string, std::vector<GroupSample>> per_category;
};

// Per-trial accuracy percentages, overall and per subcategory.
AccuracyBreakdown compute_accuracies(const LoadedRun& run);

struct ReportTables {
  bool has_inferential = false;  // >= 2 groups with >= 2 trials each
  AnovaResult anova;
  ComparisonTable welch_grid;
  DunnettResult dunnett;  // vs the first (control) group
};

ReportTables build_report_tables(const std::vector<GroupSample>& groups);

std::string report_markdown(const std::string& title,
                            const std::vector<GroupSample>& groups,
                            const ReportTables& tables);
std::string report_csv(const std::vector<GroupSample>& groups,
                       const ReportTables& tables);

// Writes summary.csv, summary.md, and categories/<name>.{csv,md} under
// out_dir from the records in run_dir.
void write_report(const std::filesystem::path& run_dir,
                  const std::filesystem::path& out_dir);

}  // namespace ragmark
