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
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ragmark {

// p-values below this are reported at the floor (singular cases included).
inline constexpr double kPValueFloor = 1e-12;

// Fixed seed for the Dunnett Monte Carlo reference distribution.
inline constexpr std::uint64_t kDunnettMcSeed = 0x9D2C5F1A6B3E8D47ULL;
inline constexpr std::size_t kDunnettMcDraws = 200000;

struct GroupSample {
  std::string condition_name;
  std::vector<double> values;  // one accuracy percentage per trial
};

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;  // sample sd (n-1 denominator) / sqrt(n)
};

MeanSem mean_sem(const std::vector<double>& values);

struct AnovaResult {
  double f_stat = 0.0;
  std::size_t df_between = 0;
  std::size_t df_within = 0;
  double p_value = 1.0;
};

// Standard between/within decomposition. All-identical data yields F = 0,
// p = 1; zero within-variance with distinct means yields an infinite F and
// the p-value floor.
AnovaResult one_way_anova(const std::vector<GroupSample>& groups);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;  // Welch-Satterthwaite
  double p = 1.0;   // two-sided
};

WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Monte Carlo null distribution of the Dunnett many-to-one statistic for a
// fixed design (control size first, then treatment sizes). Instances are
// memoized per (sizes, draws, seed) so repeated tests against one design
// reuse the same reference table.
class DunnettNull {
 public:
  DunnettNull(std::vector<std::size_t> group_sizes, std::size_t draws,
              std::uint64_t seed);

  static std::shared_ptr<const DunnettNull> cached(
      const std::vector<std::size_t>& group_sizes,
      std::size_t draws = kDunnettMcDraws, std::uint64_t seed = kDunnettMcSeed);

  // P(max_j |T_j| >= t) under the joint null; floored at 1/draws.
  double adjusted_p(double abs_t) const;

  // P(|T_j| >= t) for one contrast, estimated from the same draws, so
  // adjusted_p(t) >= single_tail(j, t) holds exactly.
  double single_tail(std::size_t treatment, double abs_t) const;

  // Smallest t with adjusted_p(t) <= alpha.
  double critical_value(double alpha) const;

  std::size_t draws() const { return max_abs_t_.size(); }
  std::size_t treatments() const { return single_abs_t_.size(); }

 private:
  std::vector<double> max_abs_t_;                // sorted ascending
  std::vector<std::vector<double>> single_abs_t_;  // per treatment, sorted
};

struct DunnettResult {
  std::vector<double> t_stats;     // per treatment, vs the control
  std::vector<double> adjusted_p;  // two-sided, family-wise
  std::vector<bool> significant;   // adjusted_p < alpha
};

// Dunnett many-to-one comparisons with a pooled within-group variance;
// adjusted p-values come from the seeded Monte Carlo null.
DunnettResult dunnett_many_to_one(const GroupSample& control,
                                  const std::vector<GroupSample>& treatments,
                                  double alpha = 0.05,
                                  std::size_t draws = kDunnettMcDraws);

struct ComparisonTable {
  std::vector<std::string> condition_names;
  std::vector<double> means;
  std::vector<double> sems;
  std::vector<std::vector<double>> p_values;  // Welch two-sided; NaN diagonal
  double alpha = 0.05;
};

ComparisonTable pairwise_grid(const std::vector<GroupSample>& groups);

// "NS" at or above alpha, otherwise the smallest matching threshold bucket:
// p < 0.001 / 0.002 / 0.003 / 0.004 / 0.005 / 0.01 / 0.05.
std::string significance_bucket(double p, double alpha = 0.05);

enum class TableFormat { csv, markdown };

// Deterministic rendering; means to 1 decimal, SEMs to 2 decimals. The CSV
// format carries raw p-values next to the bucket strings.
std::string render_table(const ComparisonTable& table, TableFormat format);

// Distribution tails (upper respectively two-sided).
double f_upper_tail(double f, double df1, double df2);
double t_two_sided(double t, double df);

}  // namespace ragmark
