#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mmrag/cli/commands.hpp"
#include "mmrag/eval/stats.hpp"

namespace mmrag::cli {

/// A rendered table; cells are already formatted at the report's rounding.
struct ReportTable {
  std::string name;  // machine name: accuracy, significance, contamination, metrics
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const ReportTable&, const ReportTable&) = default;
};

struct Report {
  std::vector<ReportTable> tables;

  const ReportTable* table(std::string_view name) const;
  friend bool operator==(const Report&, const Report&) = default;
};

struct ReportOptions {
  std::size_t bootstrap_samples = 10000;
  std::uint64_t bootstrap_seed = 0;
  double z = eval::kZ95;
  double alpha = eval::kAlpha;
};

enum class ReportFormat { Markdown, Delimited };

ReportFormat parse_report_format(std::string_view s);

/// "0.828 [0.796, 0.856]"
std::string format_interval(const eval::StatInterval& s, int decimals = 3);
/// "<0.001" below the resolution, else 3 decimals.
std::string format_p(double p);

/// Accuracy per stratum with Agresti–Coull intervals, pairwise Wilcoxon tests,
/// plain-vs-permuted contamination tests and metric tables with bootstrap intervals.
/// Deterministic for identical inputs and options.
Report build_report(const std::vector<RunRecord>& runs, const eval::PriceTable& prices, const ReportOptions& options = {});

std::string render_markdown(const Report& report);
/// Tab-separated; each table starts with a "#table<TAB>name<TAB>title" line and ends with a
/// blank line. Tabs, newlines and backslashes in cells are escaped.
std::string render_delimited(const Report& report);
/// Inverse of render_delimited. Throws SchemaError on malformed input.
Report parse_delimited(std::string_view text);

/// Builds the report for `run_ids` and writes it to `out` (stdout when empty). Returns the
/// rendered text.
std::string cmd_report(const AppConfig& cfg, const std::vector<std::string>& run_ids, ReportFormat format,
                       const std::filesystem::path& out = {});

}  // namespace mmrag::cli
