#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace mmrag::eval {

enum class IntervalMethod { AgrestiCoull, BootstrapPercentile };

std::string_view to_string(IntervalMethod m) noexcept;

struct StatInterval {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  IntervalMethod method = IntervalMethod::AgrestiCoull;
  double z_or_level = 1.96;
  std::size_t n = 0;
};

inline constexpr double kZ95 = 1.96;

/// Agresti–Coull interval for x successes in n trials, clamped to [0,1]; point is x/n.
/// Throws PreconditionError unless n >= 1 and x <= n.
StatInterval agresti_coull_interval(std::size_t x, std::size_t n, double z = kZ95);

struct TestResult {
  double statistic = 0.0;  // t for the t-test, V for Wilcoxon
  double p = 1.0;          // two-sided
  std::size_t n = 0;       // effective sample size
  bool exact = false;
};

/// Paired t-test on a - b with n-1 degrees of freedom. Throws StatsError("zero variance")
/// when every difference is zero; equal nonzero differences give t = ±inf, p = 0.
TestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

/// Largest effective n for which the exact null distribution is used.
inline constexpr std::size_t kWilcoxonExactMaxN = 20;

/// Wilcoxon signed-rank test on a - b. Zero differences are dropped, ties get midranks and
/// V is the sum of ranks of positive differences. For effective n <= 20 the p-value is
/// exact (enumeration of the sign-flip distribution of the observed ranks, ties included),
/// else a normal approximation with tie and continuity correction.
/// Throws StatsError when every difference is zero.
TestResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

/// min(1, p·m) for each p. Throws PreconditionError if m is smaller than the list or a p
/// lies outside [0,1].
std::vector<double> bonferroni(const std::vector<double>& p_values, std::size_t m);

/// Percentile bootstrap of the mean; deterministic for a given seed.
StatInterval bootstrap_ci(const std::vector<double>& values, std::size_t n_boot = 10000, double level = 0.95,
                          std::uint64_t rng_seed = 0);

/// Linear-interpolation quantile of sorted data (R type 7).
double quantile_sorted(const std::vector<double>& sorted, double q);

double mean(const std::vector<double>& v);

}  // namespace mmrag::eval
