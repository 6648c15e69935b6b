#pragma once

#include <span>

namespace fastcav {

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  /// Two-sided p-value.
  double p_value = 1.0;
};

/// Two-sided Welch (unequal-variance) t-test. When both samples have zero
/// variance the test degenerates: identical means give p = 1, different means
/// give p = 0. Requires at least two values per sample.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

/// Two-sided Student-t quantile: t such that P(|T_df| <= t) = level.
double student_t_quantile(double level, double df);

}  // namespace fastcav
