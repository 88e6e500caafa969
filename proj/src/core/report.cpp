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

#include "core/report.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>

#include "core/error.hpp"

namespace ragmark {

namespace {

std::string sanitize_file_name(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out;
}

std::string format_number(double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io, "cannot write report file: " + path.string());
  }
  out << content;
  if (!out) {
    throw Error(ErrorCode::io, "write failure on report file: " + path.string());
  }
}

}  // namespace

AccuracyBreakdown compute_accuracies(const LoadedRun& run) {
  AccuracyBreakdown breakdown;
  const auto& manifest = run.manifest;

  std::unordered_map<std::string, std::string> category_of;
  std::unordered_map<std::string, std::size_t> category_total;
  for (const auto& [id, category] : manifest.questions) {
    category_of[id] = category;
    if (!category_total.count(category)) {
      breakdown.categories.push_back(category);
    }
    ++category_total[category];
  }

  for (const std::string& condition : manifest.conditions) {
    GroupSample overall;
    overall.condition_name = condition;
    std::map<std::string, GroupSample> per_cat;
    for (const std::string& category : breakdown.categories) {
      per_cat[category].condition_name = condition;
    }

    for (std::size_t trial = 1; trial <= manifest.trials; ++trial) {
      auto it = run.groups.find({condition, trial});
      if (it == run.groups.end()) {
        throw Error(ErrorCode::validation,
                    "run is missing records for " + record_file_name(condition, trial));
      }
      std::size_t correct = 0;
      std::map<std::string, std::size_t> correct_by_cat;
      for (const TrialRecord& record : it->second) {
        const std::string& category = category_of.at(record.question_id);
        if (record.correct) {
          ++correct;
          ++correct_by_cat[category];
        }
      }
      overall.values.push_back(100.0 * static_cast<double>(correct) /
                               static_cast<double>(it->second.size()));
      for (const std::string& category : breakdown.categories) {
        per_cat[category].values.push_back(
            100.0 * static_cast<double>(correct_by_cat[category]) /
            static_cast<double>(category_total.at(category)));
      }
    }

    breakdown.overall.push_back(std::move(overall));
    for (const std::string& category : breakdown.categories) {
      breakdown.per_category[category].push_back(std::move(per_cat.at(category)));
    }
  }
  return breakdown;
}

ReportTables build_report_tables(const std::vector<GroupSample>& groups) {
  ReportTables tables;
  bool enough_trials = true;
  for (const GroupSample& group : groups) {
    if (group.values.size() < 2) enough_trials = false;
  }
  tables.has_inferential = groups.size() >= 2 && enough_trials;
  if (!tables.has_inferential) return tables;

  tables.anova = one_way_anova(groups);
  tables.welch_grid = pairwise_grid(groups);
  std::vector<GroupSample> treatments(groups.begin() + 1, groups.end());
  tables.dunnett = dunnett_many_to_one(groups.front(), treatments);
  return tables;
}

std::string report_markdown(const std::string& title,
                            const std::vector<GroupSample>& groups,
                            const ReportTables& tables) {
  std::string out = "## " + title + "\n\n";

  if (!tables.has_inferential) {
    out += "| Source | Mean (%) |\n|---|---|\n";
    for (const GroupSample& group : groups) {
      double sum = 0.0;
      for (double v : group.values) sum += v;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.1f",
                    sum / static_cast<double>(group.values.size()));
      out += "| " + group.condition_name + " | " + buf + " |\n";
    }
    out += "\nComparisons need at least 2 groups with 2 trials each.\n";
    return out;
  }

  char buf[128];
  std::snprintf(buf, sizeof(buf), "One-way ANOVA: F(%zu, %zu) = %s, p = %s\n\n",
                tables.anova.df_between, tables.anova.df_within,
                format_number(tables.anova.f_stat).c_str(),
                format_number(tables.anova.p_value).c_str());
  out += buf;

  out += "Welch pairwise comparisons (two-sided):\n\n";
  out += render_table(tables.welch_grid, TableFormat::markdown);

  out += "\nDunnett many-to-one vs " + groups.front().condition_name +
         " (Monte Carlo adjusted):\n\n";
  out += "| Source | t | adjusted p | significance |\n|---|---|---|---|\n";
  for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
    out += "| " + groups[i + 1].condition_name + " | " +
           format_number(tables.dunnett.t_stats[i]) + " | " +
           format_number(tables.dunnett.adjusted_p[i]) + " | " +
           significance_bucket(tables.dunnett.adjusted_p[i]) + " |\n";
  }
  return out;
}

std::string report_csv(const std::vector<GroupSample>& groups,
                       const ReportTables& tables) {
  std::string out;
  if (!tables.has_inferential) {
    out += "condition,mean\n";
    for (const GroupSample& group : groups) {
      double sum = 0.0;
      for (double v : group.values) sum += v;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.1f",
                    sum / static_cast<double>(group.values.size()));
      out += group.condition_name + "," + buf + "\n";
    }
    return out;
  }

  out += "anova_f,df_between,df_within,anova_p\n";
  out += format_number(tables.anova.f_stat) + "," +
         std::to_string(tables.anova.df_between) + "," +
         std::to_string(tables.anova.df_within) + "," +
         format_number(tables.anova.p_value) + "\n\n";

  out += render_table(tables.welch_grid, TableFormat::csv);
  out += "\n";

  out += "condition,dunnett_t,dunnett_adjusted_p,dunnett_significance\n";
  for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
    out += groups[i + 1].condition_name + "," +
           format_number(tables.dunnett.t_stats[i]) + "," +
           format_number(tables.dunnett.adjusted_p[i]) + "," +
           significance_bucket(tables.dunnett.adjusted_p[i]) + "\n";
  }
  return out;
}

void write_report(const std::filesystem::path& run_dir,
                  const std::filesystem::path& out_dir) {
  LoadedRun run = load_records(run_dir);
  AccuracyBreakdown breakdown = compute_accuracies(run);

  std::filesystem::create_directories(out_dir);
  ReportTables overall = build_report_tables(breakdown.overall);
  std::string markdown = "# ragmark report\n\n";
  markdown += "Conditions: " + std::to_string(run.manifest.conditions.size()) +
              "; trials: " + std::to_string(run.manifest.trials) +
              "; questions: " + std::to_string(run.manifest.questions.size()) + ".\n\n";
  markdown += report_markdown("Overall", breakdown.overall, overall);
  write_text_file(out_dir / "summary.md", markdown);
  write_text_file(out_dir / "summary.csv", report_csv(breakdown.overall, overall));

  std::filesystem::create_directories(out_dir / "categories");
  std::set<std::string> used_names;
  for (const std::string& category : breakdown.categories) {
    const auto& groups = breakdown.per_category.at(category);
    ReportTables tables = build_report_tables(groups);
    std::string base = sanitize_file_name(category);
    while (!used_names.insert(base).second) base += "_";
    write_text_file(out_dir / "categories" / (base + ".md"),
                    report_markdown(category, groups, tables));
    write_text_file(out_dir / "categories" / (base + ".csv"),
                    report_csv(groups, tables));
  }
}

}  // namespace ragmark
