#include "mmrag/eval/compare.hpp"

#include <map>

#include <fmt/format.h>

#include "mmrag/errors.hpp"
#include "mmrag/eval/metrics.hpp"
#include "mmrag/eval/stats.hpp"

namespace mmrag::eval {

namespace {

using Key = std::pair<std::string, int>;

std::map<Key, bool> outcomes(const std::vector<ItemResult>& results) {
  std::map<Key, bool> m;
  for (const auto& r : results) m[{r.item_id, r.run_index}] = r.correct;
  return m;
}

/// Correctness of a and b aligned by (item, run).
std::pair<std::vector<double>, std::vector<double>> align(const std::vector<ItemResult>& a,
                                                          const std::vector<ItemResult>& b, const std::string& what) {
  const auto ma = outcomes(a);
  const auto mb = outcomes(b);
  if (ma.size() != mb.size()) {
    throw PreconditionError(fmt::format("{}: result grids differ ({} vs {} pairs)", what, ma.size(), mb.size()));
  }
  std::pair<std::vector<double>, std::vector<double>> out;
  for (auto ia = ma.begin(), ib = mb.begin(); ia != ma.end(); ++ia, ++ib) {
    if (ia->first != ib->first) {
      throw PreconditionError(fmt::format("{}: result grids differ at item '{}' run {}", what, ia->first.first,
                                          ia->first.second));
    }
    out.first.push_back(ia->second ? 1.0 : 0.0);
    out.second.push_back(ib->second ? 1.0 : 0.0);
  }
  return out;
}

std::vector<double> per_run_accuracy(const std::vector<ItemResult>& results) {
  std::map<int, Count> by_run;
  for (const auto& r : results) {
    auto& c = by_run[r.run_index];
    ++c.n;
    if (r.correct) ++c.x;
  }
  std::vector<double> out;
  for (const auto& [run, c] : by_run) out.push_back(static_cast<double>(c.x) / static_cast<double>(c.n));
  return out;
}

double overall(const std::vector<ItemResult>& results) {
  const auto c = accuracy(results);
  return c.n == 0 ? 0.0 : static_cast<double>(c.x) / static_cast<double>(c.n);
}

}  // namespace

std::vector<ContaminationRow> contamination_check(const std::vector<ContaminationCell>& cells, double alpha,
                                                  PairingUnit unit) {
  std::vector<ContaminationRow> rows;
  std::vector<double> raw;
  for (const auto& cell : cells) {
    const auto [plain_items, permuted_items] = align(cell.plain, cell.permuted, cell.label);
    ContaminationRow row;
    row.label = cell.label;
    row.plain_accuracy = overall(cell.plain);
    row.permuted_accuracy = overall(cell.permuted);
    std::vector<double> a = plain_items;
    std::vector<double> b = permuted_items;
    if (unit == PairingUnit::PerRun) {
      a = per_run_accuracy(cell.plain);
      b = per_run_accuracy(cell.permuted);
    }
    row.n_pairs = a.size();
    try {
      const auto t = paired_t_test(a, b);
      row.t = t.statistic;
      row.p = t.p;
    } catch (const StatsError&) {
      // Every difference is zero: the conditions are indistinguishable.
      row.identical = true;
      row.p = 1.0;
    }
    raw.push_back(row.p);
    rows.push_back(std::move(row));
  }
  const auto adjusted = bonferroni(raw, std::max<std::size_t>(1, cells.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].p_adjusted = adjusted[i];
    rows[i].significant = !rows[i].identical && adjusted[i] < alpha;
  }
  return rows;
}

PairedComparison compare_runs(const std::string& label_a, const std::vector<ItemResult>& a, const std::string& label_b,
                              const std::vector<ItemResult>& b, std::size_t m, double alpha) {
  const auto [xa, xb] = align(a, b, fmt::format("{} vs {}", label_a, label_b));
  PairedComparison c;
  c.a = label_a;
  c.b = label_b;
  c.n_pairs = xa.size();
  try {
    const auto w = wilcoxon_signed_rank(xa, xb);
    c.v = w.statistic;
    c.p = w.p;
    c.n_effective = w.n;
    c.exact = w.exact;
  } catch (const StatsError&) {
    c.p = 1.0;  // no differing pair
  }
  c.p_adjusted = bonferroni({c.p}, m).front();
  c.significant = c.n_effective > 0 && c.p_adjusted < alpha;
  if (c.significant) {
    const bool a_lower = overall(a) < overall(b);
    c.direction = a_lower ? fmt::format("{} < {}", label_a, label_b) : fmt::format("{} < {}", label_b, label_a);
  }
  return c;
}

std::vector<PairedComparison> pairwise_wilcoxon(const std::vector<std::pair<std::string, std::vector<ItemResult>>>& runs,
                                                double alpha) {
  const std::size_t m = runs.size() < 2 ? 1 : runs.size() * (runs.size() - 1) / 2;
  std::vector<PairedComparison> out;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      out.push_back(compare_runs(runs[i].first, runs[i].second, runs[j].first, runs[j].second, m, alpha));
    }
  }
  return out;
}

}  // namespace mmrag::eval
