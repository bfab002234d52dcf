#include "sosie/stats.hpp"

#include <algorithm>
#include <cmath>

namespace sosie {

ProportionTestResult two_proportion_test(int64_t successes_low, int64_t trials_low,
                                         int64_t successes_high, int64_t trials_high) {
  if (trials_low <= 0 || trials_high <= 0) {
    throw DegenerateInput("two_proportion_test needs at least one trial per group");
  }
  if (successes_low < 0 || successes_high < 0 || successes_low > trials_low ||
      successes_high > trials_high) {
    throw DegenerateInput("successes must lie in [0, trials]");
  }
  double n1 = static_cast<double>(trials_low);
  double n2 = static_cast<double>(trials_high);
  double s = static_cast<double>(successes_low + successes_high);
  double total = n1 + n2;
  double f = total - s;
  if (s == 0.0 || f == 0.0) {
    // both proportions identical (all failures or all successes)
    return {0.0, 1.0};
  }
  // every cell of the 2x2 table shares the same |observed - expected|;
  // the factored forms keep the statistic exactly symmetric in the groups
  double p1 = static_cast<double>(successes_low) / n1;
  double p2 = static_cast<double>(successes_high) / n2;
  double d = std::abs(p1 - p2) * (n1 * n2 / total);
  double correction = std::min(0.5, d);
  double inv_sum = total * (1.0 / s + 1.0 / f) * (1.0 / n1 + 1.0 / n2);
  double statistic = (d - correction) * (d - correction) * inv_sum;
  // chi-square(1) survival function
  double p_value = std::erfc(std::sqrt(statistic / 2.0));
  return {statistic, p_value};
}

TrendLine linear_trend(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw DegenerateInput("linear_trend needs at least two points");
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& [x, y] : points) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= static_cast<double>(points.size());
  mean_y /= static_cast<double>(points.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mean_x) * (x - mean_x);
    sxy += (x - mean_x) * (y - mean_y);
  }
  if (sxx == 0.0) throw DegenerateInput("linear_trend needs two distinct x values");
  double slope = sxy / sxx;
  return {slope, mean_y - slope * mean_x};
}

}  // namespace sosie
