// mmrag: ingest documents, build indexes, run MCQ benchmarks and report.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mmrag/cli/commands.hpp"
#include "mmrag/cli/report.hpp"
#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOperational = 1;
constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace mmrag;
  CLI::App app{"Multimodal RAG benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string data_dir;
  bool verbose = false;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "JSON config file (${ENV} references are interpolated)");
  app.add_option("--set", overrides, "Override a config value: key.path=value (repeatable)");
  app.add_option("--data-dir", data_dir, "Directory for ingested documents, indexes and runs");
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  auto* ingest = app.add_subcommand("ingest", "Parse, summarize and chunk every document in a directory");
  std::string input_dir;
  ingest->add_option("input_dir", input_dir, "Directory of PDFs (http parser) or parser fixtures")->required();

  auto* index = app.add_subcommand("index", "Build vector collections from the ingested corpus");
  std::vector<std::string> kinds;
  index->add_option("-k,--kind", kinds, "dense | multimodal | late:<colpali|colqwen|colflor> | all (repeatable)")
      ->default_val("all");

  auto* evaluate = app.add_subcommand("evaluate", "Run (or resume) a benchmark run");
  std::string spec_path;
  std::optional<std::size_t> stop_after;
  evaluate->add_option("spec", spec_path, "Run spec JSON file")->required();
  evaluate->add_option("--stop-after", stop_after, "Stop after this many new results");

  auto* report = app.add_subcommand("report", "Emit accuracy, significance and metric tables");
  std::vector<std::string> report_runs;
  std::string format = "markdown";
  std::string out_path;
  report->add_option("run_ids", report_runs, "Run ids")->required();
  report->add_option("-f,--format", format, "markdown | delimited");
  report->add_option("-o,--out", out_path, "Output file (default: stdout)");

  auto* compare = app.add_subcommand("compare", "Wilcoxon signed-rank comparison of two runs");
  std::string run_a;
  std::string run_b;
  compare->add_option("run_a", run_a)->required();
  compare->add_option("run_b", run_b)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : (quiet ? spdlog::level::warn : spdlog::level::info));

  try {
    if (!data_dir.empty()) overrides.push_back("data_dir=\"" + data_dir + "\"");
    const auto cfg = cli::load_config(config_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_path),
                                      overrides);
    if (*ingest) {
      const auto m = cli::cmd_ingest(cfg, input_dir);
      std::cout << nlohmann::json(m).dump(2) << "\n";
    } else if (*index) {
      std::vector<cli::IndexKind> parsed;
      for (const auto& k : kinds) {
        if (to_lower(k) == "all") {
          for (const auto& a : cli::IndexKind::all()) parsed.push_back(a);
        } else {
          parsed.push_back(cli::IndexKind::parse(k));
        }
      }
      for (const auto& s : cli::cmd_index(cfg, parsed)) {
        std::cout << fmt::format("{}\t{}\t{} entries ({} chunks, {} assets, {} pages)\n", s.collection, s.kind,
                                 s.entries, s.chunk_entries, s.asset_entries, s.page_entries);
      }
    } else if (*evaluate) {
      nlohmann::json spec_json;
      try {
        spec_json = nlohmann::json::parse(read_file(spec_path));
      } catch (const std::exception& e) {
        throw ConfigError(fmt::format("cannot read run spec '{}': {}", spec_path, e.what()));
      }
      const auto spec = cli::parse_run_spec(cfg, spec_json);
      const auto outcome = cli::cmd_evaluate(cfg, spec, {stop_after});
      std::cout << fmt::format("{}\t{}/{}\n", outcome.run_id, outcome.total_results, outcome.expected_results);
    } else if (*report) {
      const auto text = cli::cmd_report(cfg, report_runs, cli::parse_report_format(format), out_path);
      if (out_path.empty()) std::cout << text;
    } else if (*compare) {
      std::cout << cli::render_comparison(cli::cmd_compare(cfg, run_a, run_b));
    }
  } catch (const ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitOperational;
  }
  return kExitOk;
}
