#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmrag/eval/results.hpp"

namespace mmrag::eval {

inline constexpr double kAlpha = 0.05;

/// Pairing unit of the contamination t-test: per-run accuracies, or per-(item, run)
/// correctness.
enum class PairingUnit { PerRun, PerItem };

/// One model × augmentation configuration evaluated with plain and permuted options.
struct ContaminationCell {
  std::string label;
  std::vector<ItemResult> plain;
  std::vector<ItemResult> permuted;
};

struct ContaminationRow {
  std::string label;
  double plain_accuracy = 0.0;
  double permuted_accuracy = 0.0;
  std::size_t n_pairs = 0;
  std::optional<double> t;  // absent when the samples are identical
  double p = 1.0;
  double p_adjusted = 1.0;
  bool significant = false;
  bool identical = false;
};

/// Paired t-test of plain vs permuted per cell, Bonferroni-adjusted over all cells.
/// Throws PreconditionError when a cell's two result sets cover different (item, run)
/// grids.
std::vector<ContaminationRow> contamination_check(const std::vector<ContaminationCell>& cells, double alpha = kAlpha,
                                                  PairingUnit unit = PairingUnit::PerRun);

struct PairedComparison {
  std::string a;
  std::string b;
  std::size_t n_pairs = 0;
  std::size_t n_effective = 0;  // pairs with differing outcomes
  double v = 0.0;               // Wilcoxon V of a − b
  double p = 1.0;
  double p_adjusted = 1.0;
  bool exact = false;
  bool significant = false;
  /// "lower < higher" by accuracy, set only when significant.
  std::optional<std::string> direction;
};

/// Wilcoxon signed-rank on per-(item, run) correctness for every pair of labelled runs,
/// Bonferroni-adjusted over the number of pairs. Runs must cover the same grid.
std::vector<PairedComparison> pairwise_wilcoxon(const std::vector<std::pair<std::string, std::vector<ItemResult>>>& runs,
                                                double alpha = kAlpha);

/// Single comparison with an explicit Bonferroni m.
PairedComparison compare_runs(const std::string& label_a, const std::vector<ItemResult>& a, const std::string& label_b,
                              const std::vector<ItemResult>& b, std::size_t m = 1, double alpha = kAlpha);

}  // namespace mmrag::eval
