#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sosie {

class DegenerateInput : public std::runtime_error {
 public:
  explicit DegenerateInput(const std::string& message) : std::runtime_error(message) {}
};

struct ProportionTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Chi-square equality-of-proportion test for two (successes, trials) groups,
// df = 1, with Yates continuity correction clamped at the observed deviation
// (the R prop.test behavior: identical proportions give statistic 0, p 1).
// Throws DegenerateInput when a group has no trials.
ProportionTestResult two_proportion_test(int64_t successes_low, int64_t trials_low,
                                         int64_t successes_high, int64_t trials_high);

struct TrendLine {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares over (x, y) points.
// Throws DegenerateInput with fewer than two distinct x values.
TrendLine linear_trend(const std::vector<std::pair<double, double>>& points);

}  // namespace sosie
