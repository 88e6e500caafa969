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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"
#include "quadrature.hpp"
#include "test_helpers.hpp"

using namespace ragmark;
using ragmark::testing::f_upper_tail_oracle;
using ragmark::testing::t_two_sided_oracle;

namespace {

GroupSample group(std::string name, std::vector<double> values) {
  return GroupSample{std::move(name), std::move(values)};
}

// Independent sums-of-squares decomposition used to cross-check the ANOVA.
struct SumsOfSquares {
  double total = 0.0, between = 0.0, within = 0.0;
};

SumsOfSquares decompose(const std::vector<GroupSample>& groups) {
  SumsOfSquares ss;
  double grand_sum = 0.0;
  std::size_t n = 0;
  for (const auto& g : groups) {
    for (double v : g.values) grand_sum += v;
    n += g.values.size();
  }
  double grand_mean = grand_sum / static_cast<double>(n);
  for (const auto& g : groups) {
    double sum = 0.0;
    for (double v : g.values) sum += v;
    double mean = sum / static_cast<double>(g.values.size());
    ss.between += static_cast<double>(g.values.size()) * (mean - grand_mean) *
                  (mean - grand_mean);
    for (double v : g.values) {
      ss.within += (v - mean) * (v - mean);
      ss.total += (v - grand_mean) * (v - grand_mean);
    }
  }
  return ss;
}

}  // namespace

TEST_CASE("mean_sem fixtures") {
  MeanSem constant = mean_sem({5, 5, 5, 5});
  CHECK(constant.mean == doctest::Approx(5.0));
  CHECK(constant.sem == doctest::Approx(0.0));

  MeanSem spread = mean_sem({1, 2, 3, 4});
  CHECK(spread.mean == doctest::Approx(2.5));
  CHECK(std::fabs(spread.sem - 0.6455) <= 1e-4);

  CHECK_THROWS_AS(mean_sem({1.0}), Error);
  CHECK_THROWS_AS(mean_sem({}), Error);
}

TEST_CASE("mean_sem is permutation invariant") {
  std::vector<double> values = {3.5, 1.25, -2.0, 9.75, 4.5};
  MeanSem base = mean_sem(values);
  std::sort(values.begin(), values.end());
  do {
    MeanSem permuted = mean_sem(values);
    CHECK(permuted.mean == doctest::Approx(base.mean).epsilon(1e-12));
    CHECK(permuted.sem == doctest::Approx(base.sem).epsilon(1e-12));
  } while (std::next_permutation(values.begin(), values.end()));
}

TEST_CASE("one-way anova fixture") {
  AnovaResult result = one_way_anova({group("g1", {1, 2, 3}), group("g2", {2, 3, 4})});
  CHECK(result.f_stat == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(result.df_between == 1);
  CHECK(result.df_within == 4);
  CHECK(std::fabs(result.p_value - 0.288) <= 0.005);

  // same tail by numerical quadrature (independent of the CDF route)
  double oracle = f_upper_tail_oracle(1.5, 1.0, 4.0);
  CHECK(std::fabs(result.p_value - oracle) <= 1e-6);
}

TEST_CASE("anova singular cases") {
  AnovaResult flat = one_way_anova({group("a", {3, 3}), group("b", {3, 3})});
  CHECK(flat.f_stat == 0.0);
  CHECK(flat.p_value == 1.0);

  AnovaResult separated = one_way_anova({group("a", {1, 1}), group("b", {2, 2})});
  CHECK(std::isinf(separated.f_stat));
  CHECK(separated.p_value == kPValueFloor);

  CHECK_THROWS_AS(one_way_anova({group("only", {1, 2})}), Error);
  CHECK_THROWS_AS(one_way_anova({group("a", {1, 2}), group("b", {1})}), Error);
}

TEST_CASE("anova sums of squares identity on fuzzed groups") {
  Rng rng(555);
  for (int i = 0; i < 1000; ++i) {
    std::vector<GroupSample> groups;
    std::size_t group_count = 2 + rng.below(4);
    for (std::size_t g = 0; g < group_count; ++g) {
      GroupSample sample;
      sample.condition_name = "g" + std::to_string(g);
      std::size_t n = 2 + rng.below(5);
      for (std::size_t j = 0; j < n; ++j) {
        sample.values.push_back(rng.uniform(-50.0, 50.0));
      }
      groups.push_back(std::move(sample));
    }
    SumsOfSquares ss = decompose(groups);
    CHECK(std::fabs(ss.total - (ss.between + ss.within)) <= 1e-9 * std::max(1.0, ss.total));

    AnovaResult result = one_way_anova(groups);
    if (ss.within > 0.0) {
      double expected_f = (ss.between / static_cast<double>(group_count - 1)) /
                          (ss.within / static_cast<double>(result.df_within));
      CHECK(result.f_stat == doctest::Approx(expected_f).epsilon(1e-9));
    }
  }
}

TEST_CASE("anova F is invariant under shift and positive scaling") {
  Rng rng(777);
  for (int i = 0; i < 200; ++i) {
    std::vector<GroupSample> groups;
    for (std::size_t g = 0; g < 3; ++g) {
      GroupSample sample;
      sample.condition_name = "g" + std::to_string(g);
      for (int j = 0; j < 4; ++j) sample.values.push_back(rng.uniform(0.0, 100.0));
      groups.push_back(std::move(sample));
    }
    double f_base = one_way_anova(groups).f_stat;

    double shift = rng.uniform(-100.0, 100.0);
    double scale = rng.uniform(0.1, 10.0);
    std::vector<GroupSample> shifted = groups;
    std::vector<GroupSample> scaled = groups;
    for (auto& g : shifted) {
      for (double& v : g.values) v += shift;
    }
    for (auto& g : scaled) {
      for (double& v : g.values) v *= scale;
    }
    CHECK(one_way_anova(shifted).f_stat == doctest::Approx(f_base).epsilon(1e-9));
    CHECK(one_way_anova(scaled).f_stat == doctest::Approx(f_base).epsilon(1e-9));
  }
}

TEST_CASE("welch t-test fixture (oracle-derived)") {
  WelchResult result = welch_t_test({1, 2, 3, 4}, {3, 4, 5, 6});
  CHECK(result.t == doctest::Approx(-2.1908902).epsilon(1e-6));
  CHECK(result.df == doctest::Approx(6.0).epsilon(1e-9));
  // two independent routes for the two-sided tail
  double oracle = t_two_sided_oracle(result.t, result.df);
  CHECK(std::fabs(result.p - oracle) <= 1e-6);
  CHECK(result.p == doctest::Approx(0.070988).epsilon(1e-4));
}

TEST_CASE("welch degenerate cases") {
  WelchResult same = welch_t_test({2, 2, 2}, {2, 2, 2});
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);

  WelchResult apart = welch_t_test({1, 1}, {2, 2});
  CHECK(std::isinf(apart.t));
  CHECK(apart.p == kPValueFloor);

  CHECK_THROWS_AS(welch_t_test({1}, {2, 3}), Error);
}

TEST_CASE("dunnett null case and separated case") {
  GroupSample control = group("control", {10, 11, 9, 10});
  DunnettResult identical = dunnett_many_to_one(control, {group("t", {10, 11, 9, 10})});
  REQUIRE(identical.adjusted_p.size() == 1);
  CHECK(identical.adjusted_p[0] >= 0.99);

  DunnettResult separated = dunnett_many_to_one(
      group("control", {0.0, 0.1, -0.1, 0.0}), {group("t", {10.0, 10.1, 9.9, 10.0})});
  CHECK(separated.adjusted_p[0] < 0.001);
  CHECK(separated.significant[0]);
}

TEST_CASE("dunnett adjusted p dominates the single-contrast tail") {
  Rng rng(909);
  auto table = DunnettNull::cached({4, 4, 4, 4}, 50000, 12345);
  for (int i = 0; i < 200; ++i) {
    double t = rng.uniform(0.0, 5.0);
    for (std::size_t j = 0; j < table->treatments(); ++j) {
      CHECK(table->adjusted_p(t) >= table->single_tail(j, t));
    }
  }
}

TEST_CASE("dunnett adjusted p exceeds the unadjusted welch-style p on real data") {
  Rng rng(4242);
  for (int i = 0; i < 50; ++i) {
    GroupSample control = group("control", {});
    for (int j = 0; j < 4; ++j) control.values.push_back(rng.normal() * 3.0 + 50.0);
    std::vector<GroupSample> treatments;
    for (int t = 0; t < 3; ++t) {
      GroupSample sample = group("t" + std::to_string(t), {});
      for (int j = 0; j < 4; ++j) {
        sample.values.push_back(rng.normal() * 3.0 + 50.0 + rng.uniform(-2.0, 2.0));
      }
      treatments.push_back(std::move(sample));
    }
    DunnettResult result = dunnett_many_to_one(control, treatments);
    auto table = DunnettNull::cached({4, 4, 4, 4});
    for (std::size_t t = 0; t < treatments.size(); ++t) {
      CHECK(result.adjusted_p[t] >= table->single_tail(t, result.t_stats[t]));
    }
  }
}

TEST_CASE("dunnett family-wise error calibration (reduced)") {
  // Smaller replicate count here; the acceptance suite runs the full one.
  const std::vector<std::size_t> sizes = {4, 4, 4, 4, 4};
  auto table = DunnettNull::cached(sizes);
  double critical = table->critical_value(0.05);

  Rng rng(987654321);
  const int replicates = 2000;
  int rejections = 0;
  for (int r = 0; r < replicates; ++r) {
    double control_mean = 0.0;
    std::vector<double> control(4);
    for (double& v : control) v = rng.normal();
    std::vector<std::vector<double>> treatments(4, std::vector<double>(4));
    for (auto& t : treatments) {
      for (double& v : t) v = rng.normal();
    }
    // pooled variance, df = 20 - 5 = 15
    auto mean_of = [](const std::vector<double>& v) {
      double s = 0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    control_mean = mean_of(control);
    double ss = 0.0;
    for (double v : control) ss += (v - control_mean) * (v - control_mean);
    std::vector<double> means;
    for (const auto& t : treatments) {
      double m = mean_of(t);
      means.push_back(m);
      for (double v : t) ss += (v - m) * (v - m);
    }
    double pooled = ss / 15.0;
    double max_abs_t = 0.0;
    for (double m : means) {
      double t = (m - control_mean) / std::sqrt(pooled * (0.25 + 0.25));
      max_abs_t = std::max(max_abs_t, std::fabs(t));
    }
    if (max_abs_t > critical) ++rejections;
  }
  double fwer = static_cast<double>(rejections) / replicates;
  CHECK(fwer > 0.03);
  CHECK(fwer < 0.07);
}

TEST_CASE("pairwise grid shape and symmetry") {
  auto groups = std::vector<GroupSample>{group("a", {1, 2, 3, 4}),
                                         group("b", {3, 4, 5, 6}),
                                         group("c", {1.5, 2.5, 3.5, 4.5})};
  ComparisonTable table = pairwise_grid(groups);
  REQUIRE(table.condition_names.size() == 3);
  CHECK(std::isnan(table.p_values[0][0]));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(table.p_values[i][j] == table.p_values[j][i]);
    }
  }
  CHECK(table.p_values[0][1] == doctest::Approx(0.070988).epsilon(1e-4));
  CHECK(table.means[0] == doctest::Approx(2.5));
  CHECK(table.sems[0] == doctest::Approx(0.6455).epsilon(1e-3));
}

TEST_CASE("identical groups render NS everywhere") {
  auto groups = std::vector<GroupSample>{group("a", {1, 2, 3}), group("b", {1, 2, 3})};
  ComparisonTable table = pairwise_grid(groups);
  CHECK(significance_bucket(table.p_values[0][1]) == "NS");
}

TEST_CASE("significance buckets follow the threshold ladder") {
  CHECK(significance_bucket(0.0005) == "p < 0.001");
  CHECK(significance_bucket(0.0015) == "p < 0.002");
  CHECK(significance_bucket(0.0032) == "p < 0.004");
  CHECK(significance_bucket(0.0045) == "p < 0.005");
  CHECK(significance_bucket(0.007) == "p < 0.01");
  CHECK(significance_bucket(0.03) == "p < 0.05");
  CHECK(significance_bucket(0.05) == "NS");
  CHECK(significance_bucket(0.6) == "NS");
}

TEST_CASE("render_table rounding rules") {
  ComparisonTable table;
  table.condition_names = {"X", "Y"};
  table.means = {59.153, 40.0};
  table.sems = {0.496, 0.341};
  double nan = std::numeric_limits<double>::quiet_NaN();
  table.p_values = {{nan, 0.0004}, {0.0004, nan}};

  std::string markdown = render_table(table, TableFormat::markdown);
  CHECK(markdown.find("| X | 59.2 | 0.50 |") != std::string::npos);
  CHECK(markdown.find("p < 0.001") != std::string::npos);

  std::string csv = render_table(table, TableFormat::csv);
  CHECK(csv.find("X,59.2,0.50") != std::string::npos);
  CHECK(csv.find("0.0004") != std::string::npos);  // raw p next to the bucket
}

TEST_CASE("csv and markdown carry identical numeric content") {
  auto groups = std::vector<GroupSample>{group("a", {10, 20, 30, 40}),
                                         group("b", {15, 25, 35, 45})};
  ComparisonTable table = pairwise_grid(groups);
  std::string markdown = render_table(table, TableFormat::markdown);
  std::string csv = render_table(table, TableFormat::csv);
  for (std::size_t i = 0; i < table.condition_names.size(); ++i) {
    char mean_buf[32], sem_buf[32];
    std::snprintf(mean_buf, sizeof(mean_buf), "%.1f", table.means[i]);
    std::snprintf(sem_buf, sizeof(sem_buf), "%.2f", table.sems[i]);
    CHECK(markdown.find(mean_buf) != std::string::npos);
    CHECK(csv.find(mean_buf) != std::string::npos);
    CHECK(markdown.find(sem_buf) != std::string::npos);
    CHECK(csv.find(sem_buf) != std::string::npos);
  }
}

TEST_CASE("render_table golden fixture") {
  ComparisonTable table;
  table.condition_names = {"Baseline", "relevant", "random_words"};
  table.means = {40.25, 59.1534, 55.3};
  table.sems = {0.342, 0.4961, 0.55};
  double nan = std::numeric_limits<double>::quiet_NaN();
  table.p_values = {{nan, 0.00041, 0.0021},
                    {0.00041, nan, 0.0309},
                    {0.0021, 0.0309, nan}};
  std::string markdown = render_table(table, TableFormat::markdown);
  std::string expected =
      ragmark::testing::read_file(std::string(RAGMARK_TEST_DATA_DIR) + "/golden_table.md");
  CHECK(markdown == expected);
  CHECK(!expected.empty());
}

TEST_CASE("distribution tails agree with the quadrature oracle") {
  CHECK(std::fabs(f_upper_tail(2.5, 3, 12) - f_upper_tail_oracle(2.5, 3, 12)) <= 1e-6);
  CHECK(std::fabs(f_upper_tail(0.7, 2, 8) - f_upper_tail_oracle(0.7, 2, 8)) <= 1e-6);
  CHECK(std::fabs(t_two_sided(2.0, 5) - t_two_sided_oracle(2.0, 5)) <= 1e-6);
  CHECK(std::fabs(t_two_sided(-1.3, 9) - t_two_sided_oracle(-1.3, 9)) <= 1e-6);
}
