#include "loopsim/stats.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "loopsim/errors.hpp"

namespace loopsim {

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b);
// converges quickly for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 500;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) return h;
  }
  throw Error("incomplete beta continued fraction did not converge (a=" + std::to_string(a) +
              ", b=" + std::to_string(b) + ", x=" + std::to_string(x) + ")");
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

Moments moments(std::span<const double> v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.variance = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
  return m;
}

TTestResult from_statistic(double mean_difference, double standard_error, double df) {
  TTestResult r;
  r.df = df;
  if (standard_error == 0.0) {
    if (mean_difference == 0.0) return r;
    r.degenerate_variance = true;
    r.t = std::copysign(std::numeric_limits<double>::infinity(), mean_difference);
    r.p = 0.0;
    return r;
  }
  r.t = mean_difference / standard_error;
  r.p = student_t_two_sided_p(r.t, df);
  return r;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ContractError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ContractError("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw ContractError("Student t needs df > 0");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

double student_t_cdf(double t, double df) {
  const double tail = 0.5 * student_t_two_sided_p(t, df);
  return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(std::span<const double> before, std::span<const double> after) {
  if (before.size() != after.size()) throw ContractError("paired t-test needs equal-length samples");
  if (before.size() < 2) throw ContractError("paired t-test needs at least 2 pairs");
  std::vector<double> diff(before.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = after[i] - before[i];
  const auto m = moments(diff);
  const auto n = static_cast<double>(diff.size());
  return from_statistic(m.mean, std::sqrt(m.variance / n), n - 1.0);
}

TTestResult independent_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ContractError("independent t-test needs 2+ values per sample");
  const auto ma = moments(a);
  const auto mb = moments(b);
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  const double df = na + nb - 2.0;
  const double pooled = ((na - 1.0) * ma.variance + (nb - 1.0) * mb.variance) / df;
  return from_statistic(mb.mean - ma.mean, std::sqrt(pooled * (1.0 / na + 1.0 / nb)), df);
}

TTestResult t_test(TestKind kind, std::span<const double> before, std::span<const double> after) {
  return kind == TestKind::kPaired ? paired_t_test(before, after) : independent_t_test(before, after);
}

}  // namespace loopsim
