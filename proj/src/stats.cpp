#include "windplan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace windplan::stats {

StatsSummary summarize(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("summarize: need at least 2 values");
  StatsSummary s;
  s.n_runs = values.size();
  s.best = *std::min_element(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / (n - 1.0));
  // Rounding in the mean can put it a hair below the minimum for constant data.
  s.mean = std::max(s.mean, s.best);
  return s;
}

namespace {

struct Ranked {
  double rank_sum_a = 0.0;
  double tie_term = 0.0;  // sum of (t^3 - t) over tie groups
  bool has_ties = false;
};

Ranked rank_samples(std::span<const double> a, std::span<const double> b) {
  struct Item {
    double value;
    bool from_a;
  };
  std::vector<Item> all;
  all.reserve(a.size() + b.size());
  for (double v : a) all.push_back({v, true});
  for (double v : b) all.push_back({v, false});
  std::stable_sort(all.begin(), all.end(), [](const Item& x, const Item& y) { return x.value < y.value; });

  Ranked r;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j + 1 < all.size() && all[j + 1].value == all[i].value) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1) {
      r.has_ties = true;
      r.tie_term += t * t * t - t;
    }
    for (std::size_t k = i; k <= j; ++k)
      if (all[k].from_a) r.rank_sum_a += mid;
    i = j + 1;
  }
  return r;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Number of ways to choose n of the ranks 1..n+m with each rank sum, via the
// standard subset-sum recurrence on U = W - n(n+1)/2.
std::vector<double> exact_u_counts(std::size_t n, std::size_t m) {
  // counts[k][u]: k items chosen from the ranks seen so far, excess u.
  const std::size_t umax = n * m;
  std::vector<std::vector<double>> counts(n + 1, std::vector<double>(umax + 1, 0.0));
  counts[0][0] = 1.0;
  // Adding rank r (1-based) as the k-th chosen item adds (r - k) to U.
  for (std::size_t r = 1; r <= n + m; ++r) {
    for (std::size_t k = std::min(n, r); k >= 1; --k) {
      if (r < k) continue;
      const std::size_t add = r - k;
      if (add > m) continue;
      for (std::size_t u = umax; u + 1 > add; --u) counts[k][u] += counts[k - 1][u - add];
    }
  }
  return counts[n];
}

std::string mark_for(double p, double alpha, double u_a, double expected) {
  if (p < alpha) {
    if (u_a < expected) return "+";
    if (u_a > expected) return "-";
  }
  return "=";
}

void check_inputs(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wilcoxon_rank_sum: empty sample");
}

}  // namespace

WilcoxonResult wilcoxon_rank_sum_normal(std::span<const double> a, std::span<const double> b, double alpha) {
  check_inputs(a, b);
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  const Ranked r = rank_samples(a, b);

  WilcoxonResult out;
  out.u_statistic = r.rank_sum_a - n * (n + 1.0) / 2.0;
  const double mu = n * m / 2.0;
  const double total = n + m;
  const double var = n * m / 12.0 * ((total + 1.0) - r.tie_term / (total * (total - 1.0)));
  if (var <= 0.0) {
    out.p_value = 1.0;
  } else {
    const double dev = std::max(0.0, std::abs(out.u_statistic - mu) - 0.5);
    out.p_value = std::min(1.0, 2.0 * normal_sf(dev / std::sqrt(var)));
  }
  out.mark = mark_for(out.p_value, alpha, out.u_statistic, mu);
  return out;
}

WilcoxonResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, double alpha) {
  check_inputs(a, b);
  const Ranked r = rank_samples(a, b);
  if (r.has_ties || std::min(a.size(), b.size()) > 8) return wilcoxon_rank_sum_normal(a, b, alpha);

  const std::size_t n = a.size();
  const std::size_t m = b.size();
  WilcoxonResult out;
  out.exact = true;
  out.u_statistic = r.rank_sum_a - static_cast<double>(n * (n + 1)) / 2.0;
  const auto counts = exact_u_counts(n, m);
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  const auto u = static_cast<std::size_t>(std::llround(out.u_statistic));
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (k <= u) lower += counts[k];
    if (k >= u) upper += counts[k];
  }
  out.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / total);
  out.mark = mark_for(out.p_value, alpha, out.u_statistic, static_cast<double>(n * m) / 2.0);
  return out;
}

}  // namespace windplan::stats
