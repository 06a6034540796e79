#include "mmrag/eval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "mmrag/errors.hpp"

namespace mmrag::eval {

std::string_view to_string(IntervalMethod m) noexcept {
  return m == IntervalMethod::AgrestiCoull ? "agresti-coull" : "bootstrap-percentile";
}

StatInterval agresti_coull_interval(std::size_t x, std::size_t n, double z) {
  if (n == 0) throw PreconditionError("agresti-coull interval needs n >= 1");
  if (x > n) throw PreconditionError(fmt::format("agresti-coull interval needs x <= n (x={}, n={})", x, n));
  if (!(z > 0.0)) throw PreconditionError("z must be positive");
  const double z2 = z * z;
  const double n_adj = static_cast<double>(n) + z2;
  const double p_adj = (static_cast<double>(x) + z2 / 2.0) / n_adj;
  const double half = z * std::sqrt(p_adj * (1.0 - p_adj) / n_adj);
  StatInterval s;
  s.point = static_cast<double>(x) / static_cast<double>(n);
  s.lo = std::clamp(p_adj - half, 0.0, 1.0);
  s.hi = std::clamp(p_adj + half, 0.0, 1.0);
  s.method = IntervalMethod::AgrestiCoull;
  s.z_or_level = z;
  s.n = n;
  return s;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw StatsError("mean of empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

namespace {

std::vector<double> differences(const std::vector<double>& a, const std::vector<double>& b, std::string_view test) {
  if (a.size() != b.size()) {
    throw PreconditionError(fmt::format("{}: samples differ in length ({} vs {})", test, a.size(), b.size()));
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

TestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  const auto d = differences(a, b, "paired t-test");
  if (d.size() < 2) throw StatsError("paired t-test needs at least 2 pairs");
  const double m = mean(d);
  double ss = 0.0;
  for (double x : d) ss += (x - m) * (x - m);
  const double n = static_cast<double>(d.size());
  const double sd = std::sqrt(ss / (n - 1.0));
  TestResult r;
  r.n = d.size();
  if (sd == 0.0) {
    if (m == 0.0) throw StatsError("zero variance");
    r.statistic = m > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  r.statistic = m / (sd / std::sqrt(n));
  const boost::math::students_t dist(n - 1.0);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.statistic))));
  return r;
}

TestResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
  auto d = differences(a, b, "wilcoxon signed-rank");
  d.erase(std::remove(d.begin(), d.end(), 0.0), d.end());
  if (d.empty()) throw StatsError("all differences are zero");
  const std::size_t n = d.size();

  // Midranks of |d|, doubled so that they stay integral.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return std::fabs(d[i]) < std::fabs(d[j]); });
  std::vector<std::uint64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::fabs(d[idx[j + 1]]) == std::fabs(d[idx[i]])) ++j;
    const std::uint64_t r2 = (i + 1) + (j + 1);  // 2 * mean of ranks i+1..j+1
    for (std::size_t k = i; k <= j; ++k) rank2[idx[k]] = r2;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  std::uint64_t v2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] > 0) v2 += rank2[i];
  }

  TestResult r;
  r.statistic = static_cast<double>(v2) / 2.0;
  r.n = n;
  const double nn = static_cast<double>(n);
  if (n <= kWilcoxonExactMaxN) {
    // counts[s] = number of sign assignments with doubled positive-rank sum s.
    const std::uint64_t total2 = std::accumulate(rank2.begin(), rank2.end(), std::uint64_t{0});
    std::vector<std::uint64_t> counts(total2 + 1, 0);
    counts[0] = 1;
    std::uint64_t reach = 0;
    for (const auto r2 : rank2) {
      reach += r2;
      for (std::uint64_t s = reach; s >= r2; --s) counts[s] += counts[s - r2];
    }
    std::uint64_t le = 0;
    std::uint64_t ge = 0;
    for (std::uint64_t s = 0; s <= total2; ++s) {
      if (s <= v2) le += counts[s];
      if (s >= v2) ge += counts[s];
    }
    const double denom = std::ldexp(1.0, static_cast<int>(n));
    r.p = std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / denom);
    r.exact = true;
    return r;
  }
  const double mu = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) throw StatsError("zero variance");
  const double diff = r.statistic - mu;
  const double cc = diff > 0 ? 0.5 : (diff < 0 ? -0.5 : 0.0);
  const double z = (diff - cc) / std::sqrt(var);
  const boost::math::normal normal;
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(normal, std::fabs(z))));
  return r;
}

std::vector<double> bonferroni(const std::vector<double>& p_values, std::size_t m) {
  if (m < 1 || m < p_values.size()) {
    throw PreconditionError(fmt::format("bonferroni: m={} is smaller than the {} comparisons", m, p_values.size()));
  }
  std::vector<double> out;
  out.reserve(p_values.size());
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError(fmt::format("bonferroni: p={} outside [0,1]", p));
    out.push_back(std::min(1.0, p * static_cast<double>(m)));
  }
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw StatsError("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

StatInterval bootstrap_ci(const std::vector<double>& values, std::size_t n_boot, double level, std::uint64_t rng_seed) {
  if (values.empty()) throw StatsError("bootstrap of empty sample");
  if (n_boot < 1) throw PreconditionError("bootstrap needs n_boot >= 1");
  if (!(level > 0.0 && level < 1.0)) throw PreconditionError("bootstrap level must lie in (0,1)");
  const std::size_t n = values.size();
  std::mt19937_64 rng(rng_seed);
  std::vector<double> means(n_boot);
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += values[static_cast<std::size_t>(rng() % n)];
    m = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  StatInterval s;
  s.point = mean(values);
  s.lo = std::min(s.point, quantile_sorted(means, (1.0 - level) / 2.0));
  s.hi = std::max(s.point, quantile_sorted(means, 1.0 - (1.0 - level) / 2.0));
  s.method = IntervalMethod::BootstrapPercentile;
  s.z_or_level = level;
  s.n = n;
  return s;
}

}  // namespace mmrag::eval
