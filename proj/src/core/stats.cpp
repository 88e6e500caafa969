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

#include "core/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace ragmark {

namespace {

double clamp_p(double p) {
  if (p < kPValueFloor) return kPValueFloor;
  if (p > 1.0) return 1.0;
  return p;
}

void require_group(const GroupSample& group) {
  if (group.values.size() < 2) {
    throw Error(ErrorCode::invalid_argument,
                "group '" + group.condition_name + "' needs at least 2 values");
  }
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sum_sq_dev(const std::vector<double>& values, double mean) {
  double sum = 0.0;
  for (double v : values) sum += (v - mean) * (v - mean);
  return sum;
}

}  // namespace

double f_upper_tail(double f, double df1, double df2) {
  boost::math::fisher_f_distribution<double> dist(df1, df2);
  return boost::math::cdf(boost::math::complement(dist, f));
}

double t_two_sided(double t, double df) {
  boost::math::students_t_distribution<double> dist(df);
  return 2.0 * boost::math::cdf(dist, -std::fabs(t));
}

MeanSem mean_sem(const std::vector<double>& values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "mean_sem needs at least 2 values");
  }
  const double n = static_cast<double>(values.size());
  MeanSem result;
  result.mean = mean_of(values);
  double variance = sum_sq_dev(values, result.mean) / (n - 1.0);
  result.sem = std::sqrt(variance) / std::sqrt(n);
  return result;
}

AnovaResult one_way_anova(const std::vector<GroupSample>& groups) {
  if (groups.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "one_way_anova needs at least 2 groups");
  }
  std::size_t total_n = 0;
  double total_sum = 0.0;
  for (const GroupSample& group : groups) {
    require_group(group);
    total_n += group.values.size();
    for (double v : group.values) total_sum += v;
  }
  const double grand_mean = total_sum / static_cast<double>(total_n);

  double ss_between = 0.0;
  double ss_within = 0.0;
  for (const GroupSample& group : groups) {
    double group_mean = mean_of(group.values);
    double diff = group_mean - grand_mean;
    ss_between += static_cast<double>(group.values.size()) * diff * diff;
    ss_within += sum_sq_dev(group.values, group_mean);
  }

  AnovaResult result;
  result.df_between = groups.size() - 1;
  result.df_within = total_n - groups.size();

  if (ss_within == 0.0) {
    if (ss_between == 0.0) {
      result.f_stat = 0.0;  // every observation identical
      result.p_value = 1.0;
    } else {
      result.f_stat = std::numeric_limits<double>::infinity();
      result.p_value = kPValueFloor;
    }
    return result;
  }

  result.f_stat = (ss_between / static_cast<double>(result.df_between)) /
                  (ss_within / static_cast<double>(result.df_within));
  result.p_value = clamp_p(f_upper_tail(result.f_stat,
                                        static_cast<double>(result.df_between),
                                        static_cast<double>(result.df_within)));
  return result;
}

WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "welch_t_test needs at least 2 values per sample");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  const double va = sum_sq_dev(a, ma) / (na - 1.0);
  const double vb = sum_sq_dev(b, mb) / (nb - 1.0);

  WelchResult result;
  const double se_sq = va / na + vb / nb;
  if (se_sq == 0.0) {
    if (ma == mb) {
      result.t = 0.0;
      result.df = na + nb - 2.0;
      result.p = 1.0;
    } else {
      result.t = ma > mb ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
      result.df = na + nb - 2.0;
      result.p = kPValueFloor;
    }
    return result;
  }
  result.t = (ma - mb) / std::sqrt(se_sq);
  const double term_a = (va / na) * (va / na) / (na - 1.0);
  const double term_b = (vb / nb) * (vb / nb) / (nb - 1.0);
  result.df = se_sq * se_sq / (term_a + term_b);
  result.p = clamp_p(t_two_sided(result.t, result.df));
  return result;
}

DunnettNull::DunnettNull(std::vector<std::size_t> group_sizes, std::size_t draws,
                         std::uint64_t seed) {
  if (group_sizes.size() < 2) {
    throw Error(ErrorCode::invalid_argument,
                "Dunnett null needs a control and at least one treatment size");
  }
  if (draws == 0) {
    throw Error(ErrorCode::invalid_argument, "Dunnett null needs at least one draw");
  }
  std::size_t total_n = 0;
  for (std::size_t n : group_sizes) {
    if (n < 2) {
      throw Error(ErrorCode::invalid_argument, "each group needs at least 2 observations");
    }
    total_n += n;
  }
  const std::size_t k = group_sizes.size() - 1;
  const std::size_t df = total_n - group_sizes.size();
  const double n_control = static_cast<double>(group_sizes[0]);

  max_abs_t_.resize(draws);
  single_abs_t_.assign(k, std::vector<double>(draws));

  Rng rng(seed);
  for (std::size_t d = 0; d < draws; ++d) {
    // Group means under the null: m_i ~ N(0, 1/n_i).
    double control_mean = rng.normal() / std::sqrt(n_control);
    double chi_sq = 0.0;
    for (std::size_t i = 0; i < df; ++i) {
      double z = rng.normal();
      chi_sq += z * z;
    }
    const double pooled = chi_sq / static_cast<double>(df);
    double max_abs = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double n_j = static_cast<double>(group_sizes[j + 1]);
      double treatment_mean = rng.normal() / std::sqrt(n_j);
      double t = (treatment_mean - control_mean) /
                 std::sqrt(pooled * (1.0 / n_j + 1.0 / n_control));
      double abs_t = std::fabs(t);
      single_abs_t_[j][d] = abs_t;
      max_abs = std::max(max_abs, abs_t);
    }
    max_abs_t_[d] = max_abs;
  }
  std::sort(max_abs_t_.begin(), max_abs_t_.end());
  for (auto& column : single_abs_t_) std::sort(column.begin(), column.end());
}

namespace {

double sorted_tail_fraction(const std::vector<double>& sorted, double abs_t) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), abs_t);
  auto count = static_cast<double>(sorted.end() - it);
  double p = count / static_cast<double>(sorted.size());
  double floor = 1.0 / static_cast<double>(sorted.size());
  return std::max(p, floor);
}

}  // namespace

double DunnettNull::adjusted_p(double abs_t) const {
  return sorted_tail_fraction(max_abs_t_, std::fabs(abs_t));
}

double DunnettNull::single_tail(std::size_t treatment, double abs_t) const {
  if (treatment >= single_abs_t_.size()) {
    throw Error(ErrorCode::invalid_argument, "treatment index out of range");
  }
  return sorted_tail_fraction(single_abs_t_[treatment], std::fabs(abs_t));
}

double DunnettNull::critical_value(double alpha) const {
  // (1 - alpha) quantile of the max-|t| null distribution.
  auto idx = static_cast<std::size_t>(
      std::ceil((1.0 - alpha) * static_cast<double>(max_abs_t_.size())));
  if (idx >= max_abs_t_.size()) idx = max_abs_t_.size() - 1;
  return max_abs_t_[idx];
}

std::shared_ptr<const DunnettNull> DunnettNull::cached(
    const std::vector<std::size_t>& group_sizes, std::size_t draws,
    std::uint64_t seed) {
  struct Key {
    std::vector<std::size_t> sizes;
    std::size_t draws;
    std::uint64_t seed;
    bool operator<(const Key& other) const {
      if (sizes != other.sizes) return sizes < other.sizes;
      if (draws != other.draws) return draws < other.draws;
      return seed < other.seed;
    }
  };
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const DunnettNull>> cache;

  Key key{group_sizes, draws, seed};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto table = std::make_shared<const DunnettNull>(group_sizes, draws, seed);
  cache.emplace(std::move(key), table);
  return table;
}

DunnettResult dunnett_many_to_one(const GroupSample& control,
                                  const std::vector<GroupSample>& treatments,
                                  double alpha, std::size_t draws) {
  if (treatments.empty()) {
    throw Error(ErrorCode::invalid_argument, "dunnett_many_to_one needs >= 1 treatment");
  }
  require_group(control);
  for (const GroupSample& t : treatments) require_group(t);

  std::vector<std::size_t> sizes;
  sizes.push_back(control.values.size());
  for (const GroupSample& t : treatments) sizes.push_back(t.values.size());

  // Pooled within-group variance over control + treatments.
  std::size_t total_n = control.values.size();
  const double control_mean = mean_of(control.values);
  double ss_within = sum_sq_dev(control.values, control_mean);
  for (const GroupSample& t : treatments) {
    total_n += t.values.size();
    ss_within += sum_sq_dev(t.values, mean_of(t.values));
  }
  const std::size_t df = total_n - sizes.size();
  const double pooled = ss_within / static_cast<double>(df);

  auto null_table = DunnettNull::cached(sizes, draws);

  DunnettResult result;
  const double n_control = static_cast<double>(control.values.size());
  for (const GroupSample& t : treatments) {
    const double n_t = static_cast<double>(t.values.size());
    double se = std::sqrt(pooled * (1.0 / n_t + 1.0 / n_control));
    double stat;
    if (se == 0.0) {
      double diff = mean_of(t.values) - control_mean;
      stat = diff == 0.0 ? 0.0
                         : std::copysign(std::numeric_limits<double>::infinity(), diff);
    } else {
      stat = (mean_of(t.values) - control_mean) / se;
    }
    result.t_stats.push_back(stat);
    double p = std::isinf(stat) ? 1.0 / static_cast<double>(null_table->draws())
                                : null_table->adjusted_p(std::fabs(stat));
    result.adjusted_p.push_back(p);
    result.significant.push_back(p < alpha);
  }
  return result;
}

ComparisonTable pairwise_grid(const std::vector<GroupSample>& groups) {
  if (groups.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "pairwise_grid needs at least 2 groups");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ComparisonTable table;
  for (const GroupSample& group : groups) {
    require_group(group);
    MeanSem ms = mean_sem(group.values);
    table.condition_names.push_back(group.condition_name);
    table.means.push_back(ms.mean);
    table.sems.push_back(ms.sem);
  }
  table.p_values.assign(groups.size(), std::vector<double>(groups.size(), nan));
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      double p = welch_t_test(groups[i].values, groups[j].values).p;
      table.p_values[i][j] = p;
      table.p_values[j][i] = p;
    }
  }
  return table;
}

std::string significance_bucket(double p, double alpha) {
  if (!(p < alpha)) return "NS";
  static const double kBuckets[] = {0.001, 0.002, 0.003, 0.004, 0.005, 0.01, 0.05};
  for (double bucket : kBuckets) {
    if (p < bucket) {
      char buf[24];
      std::snprintf(buf, sizeof(buf), "p < %g", bucket);
      return buf;
    }
  }
  // alpha above every bucket: fall back to the alpha threshold itself.
  char buf[24];
  std::snprintf(buf, sizeof(buf), "p < %g", alpha);
  return buf;
}

namespace {

std::string format_fixed(double value, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string format_raw_p(double p) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", p);
  return buf;
}

}  // namespace

std::string render_table(const ComparisonTable& table, TableFormat format) {
  const std::size_t n = table.condition_names.size();
  std::string out;
  if (format == TableFormat::markdown) {
    out += "| Source | Mean (%) | SEM |";
    for (const std::string& name : table.condition_names) {
      out += " vs ";
      out += name;
      out += " |";
    }
    out += '\n';
    out += "|---|---|---|";
    for (std::size_t j = 0; j < n; ++j) out += "---|";
    out += '\n';
    for (std::size_t i = 0; i < n; ++i) {
      out += "| " + table.condition_names[i] + " | " +
             format_fixed(table.means[i], 1) + " | " +
             format_fixed(table.sems[i], 2) + " |";
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) {
          out += " -- |";
        } else {
          out += ' ';
          out += significance_bucket(table.p_values[i][j], table.alpha);
          out += " |";
        }
      }
      out += '\n';
    }
    return out;
  }

  out += "condition,mean,sem";
  for (const std::string& name : table.condition_names) {
    out += ",p_vs_" + name + ",sig_vs_" + name;
  }
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out += table.condition_names[i];
    out += ',';
    out += format_fixed(table.means[i], 1);
    out += ',';
    out += format_fixed(table.sems[i], 2);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        out += ",,--";
      } else {
        out += ',';
        out += format_raw_p(table.p_values[i][j]);
        out += ',';
        out += significance_bucket(table.p_values[i][j], table.alpha);
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace ragmark
