#pragma once

#include <span>
#include <string>

namespace windplan::stats {

struct StatsSummary {
  double best = 0.0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n-1)
  std::size_t n_runs = 0;
};

StatsSummary summarize(std::span<const double> values);

struct WilcoxonResult {
  double u_statistic = 0.0;  // Mann-Whitney U of sample a
  double p_value = 1.0;
  std::string mark = "=";
  bool exact = false;
};

// Two-sided rank-sum test of a (reference, e.g. MAWDO) against b (comparator)
// for minimization. "+" means a is significantly better (smaller).
// Exact null distribution when the samples are tie-free and min(n, m) <= 8;
// otherwise normal approximation with tie-corrected variance and a 0.5
// continuity correction.
WilcoxonResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

// Same test, forcing the normal approximation.
WilcoxonResult wilcoxon_rank_sum_normal(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

}  // namespace windplan::stats
