#include "mmrag/cli/report.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "mmrag/errors.hpp"
#include "mmrag/eval/compare.hpp"
#include "mmrag/eval/metrics.hpp"
#include "mmrag/util.hpp"

namespace mmrag::cli {

namespace {

constexpr std::string_view kNa = "n/a";

std::string stratum_header(std::string_view name, std::size_t n) { return fmt::format("{} (n={})", name, n); }

/// Distinct items per stratum in a result set.
std::map<std::optional<corpus::Difficulty>, std::size_t> item_counts(const std::vector<eval::ItemResult>& results) {
  std::map<std::optional<corpus::Difficulty>, std::set<std::string>> ids;
  for (const auto& r : results) {
    ids[r.difficulty].insert(r.item_id);
    ids[std::nullopt].insert(r.item_id);
  }
  std::map<std::optional<corpus::Difficulty>, std::size_t> out;
  for (const auto& [k, v] : ids) out[k] = v.size();
  return out;
}

std::string capitalized(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::string bootstrap_cell(const std::vector<double>& values, const ReportOptions& o, const std::string& salt,
                           int decimals) {
  if (values.empty()) return std::string(kNa);
  return format_interval(eval::bootstrap_ci(values, o.bootstrap_samples, 0.95, o.bootstrap_seed ^ fnv1a64(salt)),
                         decimals);
}

ReportTable accuracy_table(const std::vector<RunRecord>& runs, const ReportOptions& o) {
  ReportTable t{"accuracy", "Accuracy with Agresti-Coull 95% intervals", {}, {}};
  const auto counts = item_counts(runs.empty() ? std::vector<eval::ItemResult>{} : runs.front().results);
  const auto count = [&](std::optional<corpus::Difficulty> d) {
    const auto it = counts.find(d);
    return it == counts.end() ? std::size_t{0} : it->second;
  };
  t.columns = {"Run", "Model", "Strategy", "Options"};
  for (auto d : corpus::kDifficulties) t.columns.push_back(stratum_header(capitalized(corpus::to_string(d)), count(d)));
  t.columns.push_back(stratum_header("Average", count(std::nullopt)));
  t.columns.push_back("Parse failures");
  for (const auto& run : runs) {
    std::vector<std::string> row{run.spec.run_id, run.spec.model_id, run.spec.strategy.label(),
                                 run.spec.permute_answers ? "permuted" : "plain"};
    const auto cell = [&](std::optional<corpus::Difficulty> d) {
      const auto c = eval::accuracy(run.results, d);
      return c.n == 0 ? std::string(kNa) : format_interval(eval::agresti_coull_interval(c.x, c.n, o.z));
    };
    for (auto d : corpus::kDifficulties) row.push_back(cell(d));
    row.push_back(cell(std::nullopt));
    row.push_back(std::to_string(eval::parse_failures(run.results)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

ReportTable significance_table(const std::vector<RunRecord>& runs, const ReportOptions& o) {
  ReportTable t{"significance",
                "Pairwise Wilcoxon signed-rank tests (Bonferroni-adjusted)",
                {"Run A", "Run B", "Pairs", "V", "p", "Adjusted p", "Significant", "Direction"},
                {}};
  std::vector<std::pair<std::string, std::vector<eval::ItemResult>>> labelled;
  for (const auto& r : runs) labelled.emplace_back(r.spec.run_id, r.results);
  for (const auto& c : eval::pairwise_wilcoxon(labelled, o.alpha)) {
    t.rows.push_back({c.a, c.b, std::to_string(c.n_pairs), fmt::format("{:.1f}", c.v), format_p(c.p),
                      format_p(c.p_adjusted), c.significant ? "yes" : "no", c.direction.value_or("")});
  }
  return t;
}

/// Plain/permuted run pairs that differ only in answer order.
ReportTable contamination_table(const std::vector<RunRecord>& runs, const ReportOptions& o) {
  ReportTable t{"contamination",
                "Answer-order contamination check (paired t-test on per-run accuracy, Bonferroni-adjusted)",
                {"Model", "Strategy", "Plain run", "Permuted run", "Plain", "Permuted", "t", "p", "Adjusted p", "Result"},
                {}};
  std::vector<eval::ContaminationCell> cells;
  std::vector<std::pair<const RunRecord*, const RunRecord*>> pairs;
  for (const auto& plain : runs) {
    if (plain.spec.permute_answers) continue;
    for (const auto& perm : runs) {
      if (!perm.spec.permute_answers || perm.spec.model_id != plain.spec.model_id ||
          perm.spec.strategy != plain.spec.strategy || perm.spec.n_runs != plain.spec.n_runs) {
        continue;
      }
      pairs.emplace_back(&plain, &perm);
      cells.push_back({plain.spec.run_id + "/" + perm.spec.run_id, plain.results, perm.results});
      break;
    }
  }
  const auto rows = eval::contamination_check(cells, o.alpha);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    t.rows.push_back({pairs[i].first->spec.model_id, pairs[i].first->spec.strategy.label(), pairs[i].first->spec.run_id,
                      pairs[i].second->spec.run_id, fmt::format("{:.3f}", r.plain_accuracy),
                      fmt::format("{:.3f}", r.permuted_accuracy), r.t ? fmt::format("{:.3f}", *r.t) : std::string(kNa),
                      format_p(r.p), format_p(r.p_adjusted),
                      r.identical ? "identical" : (r.significant ? "significant" : "not significant")});
  }
  return t;
}

ReportTable metrics_table(const std::vector<RunRecord>& runs, const eval::PriceTable& prices, const ReportOptions& o) {
  std::set<std::size_t> ks;
  for (const auto& r : runs) ks.insert(r.spec.k);
  const auto p_at = ks.size() == 1 ? fmt::format("P@{}", *ks.begin()) : std::string("P@k");
  ReportTable t{"metrics",
                "Retrieval, latency, tokens and cost (bootstrap 95% intervals)",
                {"Run", p_at, "Latency (s)", "Tokens", "TTFT (ms)", "Throughput (tok/s)", "Cost (USD)",
                 "Price per correct (cents)"},
                {}};
  for (const auto& run : runs) {
    std::vector<double> precision, latency, tokens, ttft, tput;
    for (const auto& r : run.results) {
      if (r.precision_at_k) precision.push_back(*r.precision_at_k);
      if (r.error) continue;
      latency.push_back(r.record.latency_s);
      tokens.push_back(static_cast<double>(r.record.prompt_tokens + r.record.completion_tokens));
      if (r.record.ttft_ms) ttft.push_back(*r.record.ttft_ms);
      if (r.record.latency_s > 0) {
        tput.push_back(eval::throughput(static_cast<double>(r.record.completion_tokens), r.record.latency_s));
      }
    }
    const auto& id = run.spec.run_id;
    std::string cost = std::string(kNa);
    std::string per_correct = std::string(kNa);
    if (prices.count(run.spec.model_id) > 0) {
      const double usd = eval::cost_of_results(run.results, prices, run.spec.model_id);
      cost = fmt::format("{:.2f}", usd);
      if (const auto c = eval::price_per_correct(usd, eval::accuracy(run.results).x)) per_correct = fmt::format("{:.2f}", *c);
    }
    t.rows.push_back({id, bootstrap_cell(precision, o, id + "/p@k", 3), bootstrap_cell(latency, o, id + "/latency", 2),
                      bootstrap_cell(tokens, o, id + "/tokens", 2), bootstrap_cell(ttft, o, id + "/ttft", 2),
                      bootstrap_cell(tput, o, id + "/throughput", 2), cost, per_correct});
  }
  return t;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\\') {
      out += "\\\\";
    } else if (c == '\t') {
      out += "\\t";
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (++i == s.size()) throw SchemaError("dangling escape in delimited report");
    switch (s[i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      default: throw SchemaError(fmt::format("unknown escape '\\{}' in delimited report", s[i]));
    }
  }
  return out;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(unescape(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start)));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string join_tabs(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += '\t';
    out += escape(cells[i]);
  }
  return out;
}

std::string md_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

const ReportTable* Report::table(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

ReportFormat parse_report_format(std::string_view s) {
  const auto lower = to_lower(trim(s));
  if (lower == "markdown" || lower == "md") return ReportFormat::Markdown;
  if (lower == "delimited" || lower == "tsv") return ReportFormat::Delimited;
  throw ConfigError(fmt::format("unknown report format '{}' (markdown, delimited)", s));
}

std::string format_interval(const eval::StatInterval& s, int decimals) {
  return fmt::format("{:.{}f} [{:.{}f}, {:.{}f}]", s.point, decimals, s.lo, decimals, s.hi, decimals);
}

std::string format_p(double p) { return p < 0.0005 ? std::string("<0.001") : fmt::format("{:.3f}", p); }

Report build_report(const std::vector<RunRecord>& runs, const eval::PriceTable& prices, const ReportOptions& options) {
  Report r;
  r.tables.push_back(accuracy_table(runs, options));
  if (runs.size() >= 2) r.tables.push_back(significance_table(runs, options));
  auto contamination = contamination_table(runs, options);
  if (!contamination.rows.empty()) r.tables.push_back(std::move(contamination));
  r.tables.push_back(metrics_table(runs, prices, options));
  return r;
}

std::string render_markdown(const Report& report) {
  std::string out;
  for (const auto& t : report.tables) {
    out += fmt::format("## {}\n\n|", t.title);
    for (const auto& c : t.columns) out += fmt::format(" {} |", md_cell(c));
    out += "\n|";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += "---|";
    out += '\n';
    for (const auto& row : t.rows) {
      out += '|';
      for (const auto& c : row) out += fmt::format(" {} |", md_cell(c));
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::string render_delimited(const Report& report) {
  std::string out;
  for (const auto& t : report.tables) {
    out += join_tabs({"#table", t.name, t.title}) + "\n";
    out += join_tabs(t.columns) + "\n";
    for (const auto& row : t.rows) out += join_tabs(row) + "\n";
    out += '\n';
  }
  return out;
}

Report parse_delimited(std::string_view text) {
  Report report;
  std::istringstream in{std::string(text)};
  std::string line;
  ReportTable* current = nullptr;
  bool need_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      if (need_header) throw SchemaError(fmt::format("line {}: table without header", lineno));
      current = nullptr;
      continue;
    }
    auto cells = split_tabs(line);
    if (current == nullptr) {
      if (cells.size() != 3 || cells[0] != "#table") throw SchemaError(fmt::format("line {}: expected a #table line", lineno));
      report.tables.push_back({cells[1], cells[2], {}, {}});
      current = &report.tables.back();
      need_header = true;
    } else if (need_header) {
      current->columns = std::move(cells);
      need_header = false;
    } else {
      if (cells.size() != current->columns.size()) {
        throw SchemaError(fmt::format("line {}: {} cells, table '{}' has {} columns", lineno, cells.size(), current->name,
                                      current->columns.size()));
      }
      current->rows.push_back(std::move(cells));
    }
  }
  if (need_header) throw SchemaError("delimited report ends inside a table header");
  return report;
}

std::string cmd_report(const AppConfig& cfg, const std::vector<std::string>& run_ids, ReportFormat format,
                       const std::filesystem::path& out) {
  if (run_ids.empty()) throw ConfigError("report needs at least one run id");
  std::vector<RunRecord> runs;
  for (const auto& id : run_ids) runs.push_back(load_run(cfg, id));
  ReportOptions o;
  o.bootstrap_samples = cfg.defaults.bootstrap_samples;
  o.bootstrap_seed = cfg.defaults.bootstrap_seed;
  const auto report = build_report(runs, cfg.prices, o);
  auto text = format == ReportFormat::Markdown ? render_markdown(report) : render_delimited(report);
  if (!out.empty()) {
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    write_file(out.string(), text);
  }
  return text;
}

}  // namespace mmrag::cli
