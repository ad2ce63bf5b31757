#pragma once

#include <cstddef>
#include <span>

namespace loopsim {

/// Bonferroni-corrected significance threshold for 12 comparisons at 0.05.
inline constexpr double kBonferroniThreshold = 0.05 / 12.0;

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// Two-sided tail probability P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  double df = 0.0;
  /// Differences have zero variance but nonzero mean.
  bool degenerate_variance = false;

  bool significant(double threshold = kBonferroniThreshold) const { return p < threshold; }
};

/// Dependent-samples t-test on after - before. Throws ContractError unless
/// both have the same length >= 2.
TTestResult paired_t_test(std::span<const double> before, std::span<const double> after);

/// Two-sample t-test with pooled variance (equal-variance assumption).
TTestResult independent_t_test(std::span<const double> a, std::span<const double> b);

enum class TestKind { kPaired, kIndependent };

TTestResult t_test(TestKind kind, std::span<const double> before, std::span<const double> after);

}  // namespace loopsim
