#include <cstdlib>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "mmrag/cli/commands.hpp"
#include "mmrag/cli/config.hpp"
#include "mmrag/cli/report.hpp"
#include "mmrag/corpus/benchmark.hpp"
#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

using namespace mmrag;
using namespace mmrag::cli;
using testing_support::fixture_dir;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

AppConfig e2e_config(const fs::path& data_dir, std::vector<std::string> extra = {}) {
  extra.insert(extra.begin(), "data_dir=" + data_dir.string());
  return load_config(fixture_dir() / "e2e_config.json", extra);
}

void write_benchmark(const fs::path& path, const std::vector<corpus::BenchmarkItem>& items) {
  std::ofstream out(path);
  for (const auto& it : items) out << nlohmann::json(it).dump() << '\n';
}

/// Ingested and indexed fixture corpus in a fresh data dir.
struct Prepared {
  TempDir dir{"cli"};
  AppConfig cfg;
  Prepared(std::vector<std::string> extra = {}) {
    cfg = e2e_config(dir.path() / "data", std::move(extra));
    cmd_ingest(cfg, fixture_dir() / "corpus");
    cmd_index(cfg, IndexKind::all());
  }
};

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) ++n;
  }
  return n;
}

int run_cli(const std::string& args) {
  const auto cmd = fmt::format("'{}' {} >/dev/null 2>&1", MMRAG_CLI, args);
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// ---- config

TEST(Config, EnvInterpolation) {
  ::setenv("MMRAG_TEST_SECRET", "s3cr\"et", 1);
  ::unsetenv("MMRAG_TEST_UNSET");
  EXPECT_EQ(interpolate_env("key=${MMRAG_TEST_SECRET}"), "key=s3cr\"et");
  EXPECT_EQ(interpolate_env("${MMRAG_TEST_UNSET:-fallback}"), "fallback");
  EXPECT_EQ(interpolate_env("${MMRAG_TEST_UNSET}"), "");
  EXPECT_EQ(interpolate_env("plain $HOME text"), "plain $HOME text");
}

TEST(Config, LoadsFixtureConfigWithSecretsFromEnv) {
  ::setenv("OPENAI_API_KEY", "sk-from-env", 1);
  TempDir dir("cfg");
  const auto cfg = e2e_config(dir.path());
  EXPECT_EQ(cfg.model("gpt-5").generator.api_key, "sk-from-env");
  EXPECT_EQ(cfg.benchmark, fixture_dir() / "benchmark.jsonl");  // relative to the config file
  EXPECT_EQ(cfg.data_dir, dir.path());
  EXPECT_EQ(cfg.embedder.dense_dim, 256u);
  EXPECT_EQ(cfg.defaults.rng_seed, 3u);
  EXPECT_EQ(public_model_json(cfg.model("gpt-5")).dump().find("sk-from-env"), std::string::npos);
  ::unsetenv("OPENAI_API_KEY");
}

TEST(Config, OverridesAndValidation) {
  TempDir dir("cfg");
  const auto cfg = e2e_config(dir.path(), {"defaults.k=3", "embedder.kind=hash", "collections.text=alt"});
  EXPECT_EQ(cfg.defaults.k, 3u);
  EXPECT_EQ(cfg.collections.text, "alt");
  EXPECT_THROW(e2e_config(dir.path(), {"defaults.bogus=1"}), ConfigError);
  EXPECT_THROW(e2e_config(dir.path(), {"store.kind=elastic"}), ConfigError);
  EXPECT_THROW(e2e_config(dir.path(), {"novalue"}), ConfigError);
  EXPECT_THROW(cfg.model("nope"), ConfigError);
  EXPECT_THROW(load_config(dir.path() / "missing.json"), ConfigError);
}

// ---- ingest / index

TEST(Ingest, FixtureDocuments) {
  TempDir dir("ingest");
  const auto cfg = e2e_config(dir.path() / "data");
  const auto m = cmd_ingest(cfg, fixture_dir() / "corpus");
  ASSERT_EQ(m.documents.size(), 3u);
  EXPECT_TRUE(m.failures.empty());
  EXPECT_TRUE(fs::exists(cfg.corpus_dir() / "manifest.json"));
  const auto corpus = load_corpus(cfg);
  EXPECT_EQ(corpus.documents().size(), 3u);
  EXPECT_EQ(corpus.page_count(), 12u);

  // Two documents only.
  TempDir two("two");
  for (const auto* id : {"solar-cells", "battery-chem"}) {
    fs::copy_file(fixture_dir() / "corpus" / (std::string(id) + ".json"), two.path() / (std::string(id) + ".json"));
  }
  EXPECT_EQ(cmd_ingest(e2e_config(dir.path() / "data2"), two.path()).documents.size(), 2u);
}

TEST(Ingest, EmptyDirectory) {
  TempDir dir("ingest");
  TempDir empty("empty");
  try {
    cmd_ingest(e2e_config(dir.path()), empty.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("no inputs"), std::string::npos);
  }
}

TEST(Ingest, CorruptDocumentIsSkipped) {
  TempDir dir("ingest");
  const auto m = cmd_ingest(e2e_config(dir.path()), fixture_dir() / "corpus_mixed");
  ASSERT_EQ(m.documents.size(), 1u);
  EXPECT_EQ(m.documents[0].doc_id, "river-ecology");
  ASSERT_EQ(m.failures.size(), 1u);
  EXPECT_EQ(m.failures[0].doc_id, "broken-scan");
}

TEST(Index, EntryCounts) {
  Prepared p;
  const auto corpus = load_corpus(p.cfg);
  auto backends = open_backends(p.cfg);
  EXPECT_EQ(backends.store->size(p.cfg.collections.text), corpus.chunk_count());
  EXPECT_EQ(backends.store->size(p.cfg.collections.multimodal), corpus.chunk_count() + corpus.summarized_asset_count());
  for (const auto r : index::kAllRetrievers) EXPECT_EQ(backends.store->size(p.cfg.collections.pages(r)), corpus.page_count());
  const auto stats = cmd_index(p.cfg, IndexKind::parse("late:colflor"), backends, corpus);
  EXPECT_EQ(stats.entries, corpus.page_count());
  EXPECT_EQ(stats.page_entries, corpus.page_count());
  EXPECT_EQ(IndexKind::parse("pages:ColQwen").name(), IndexKind::parse("late:colqwen").name());
  EXPECT_THROW(IndexKind::parse("sparse"), ConfigError);
}

// ---- evaluate

TEST(Evaluate, SixHundredResultsAndResume) {
  TempDir dir("eval");
  const auto bench = dir.path() / "bench.jsonl";
  write_benchmark(bench, testing_support::synthetic_benchmark(69, 24, 27, 1));
  const auto cfg = e2e_config(dir.path() / "data", {"benchmark=" + bench.string()});
  const auto spec = parse_run_spec(cfg, {{"run_id", "oracle-none"}, {"model", "oracle"}, {"strategy", "none"}});

  const auto first = cmd_evaluate(cfg, spec, {100});
  EXPECT_EQ(first.total_results, 100u);
  EXPECT_EQ(first.expected_results, 600u);
  const auto results = cfg.runs_dir() / "oracle-none" / "results.jsonl";
  EXPECT_EQ(line_count(results), 100u);

  const auto second = cmd_evaluate(cfg, spec);
  EXPECT_EQ(second.total_results, 600u);
  EXPECT_EQ(line_count(results), 600u);
  const auto run = load_run(cfg, "oracle-none");
  std::set<std::pair<std::string, int>> keys;
  for (const auto& r : run.results) keys.emplace(r.item_id, r.run_index);
  EXPECT_EQ(keys.size(), 600u);

  // Same id, different configuration.
  auto changed = spec;
  changed.k = 7;
  EXPECT_THROW(cmd_evaluate(cfg, changed), ConfigError);
}

TEST(Evaluate, MissingCollectionFailsBeforeRequests) {
  TempDir dir("eval");
  const auto cfg = e2e_config(dir.path() / "data");
  cmd_ingest(cfg, fixture_dir() / "corpus");
  cmd_index(cfg, {IndexKind::parse("dense")});
  const auto spec = parse_run_spec(cfg, {{"run_id", "mm"}, {"model", "oracle"}, {"strategy", "multimodal"}});
  EXPECT_THROW(cmd_evaluate(cfg, spec), ConfigError);
  EXPECT_FALSE(fs::exists(cfg.runs_dir() / "mm" / "results.jsonl") && line_count(cfg.runs_dir() / "mm" / "results.jsonl") > 0);
  EXPECT_THROW(parse_run_spec(cfg, {{"run_id", "../x"}, {"model", "oracle"}, {"strategy", "none"}}), ConfigError);
  EXPECT_THROW(load_run(cfg, "never-ran"), Error);
}

// ---- report / compare

class Reports : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    prepared_ = new Prepared();
    const auto& cfg = prepared_->cfg;
    cmd_evaluate(cfg, parse_run_spec(cfg, {{"run_id", "oracle-text"}, {"model", "oracle"}, {"strategy", "text"}}));
    cmd_evaluate(cfg, parse_run_spec(cfg, {{"run_id", "oracle-text-perm"}, {"model", "oracle"}, {"strategy", "text"},
                                           {"permute_answers", true}}));
    cmd_evaluate(cfg, parse_run_spec(cfg, {{"run_id", "random-text"}, {"model", "random"}, {"strategy", "text"}}));
  }
  static void TearDownTestSuite() {
    delete prepared_;
    prepared_ = nullptr;
  }
  static Prepared* prepared_;
};

Prepared* Reports::prepared_ = nullptr;

TEST_F(Reports, SingleRunHasFourStratumColumns) {
  const auto& cfg = prepared_->cfg;
  const auto text = cmd_report(cfg, {"oracle-text"}, ReportFormat::Markdown);
  const auto report = build_report({load_run(cfg, "oracle-text")}, cfg.prices);
  const auto* acc = report.table("accuracy");
  ASSERT_NE(acc, nullptr);
  std::vector<std::string> strata;
  for (const auto& c : acc->columns) {
    if (c.rfind("Easy", 0) == 0 || c.rfind("Medium", 0) == 0 || c.rfind("Hard", 0) == 0 || c.rfind("Average", 0) == 0) {
      strata.push_back(c);
    }
  }
  EXPECT_EQ(strata, (std::vector<std::string>{"Easy (n=6)", "Medium (n=3)", "Hard (n=3)", "Average (n=12)"}));
  ASSERT_EQ(acc->rows.size(), 1u);
  EXPECT_EQ(acc->rows[0][acc->rows[0].size() - 2], "1.000 [0.928, 1.000]");  // x = n = 60: p~ = 61.92/63.84
  EXPECT_EQ(report.table("significance"), nullptr);
  EXPECT_NE(text.find("| Easy (n=6) |"), std::string::npos);
  const auto* metrics = report.table("metrics");
  ASSERT_NE(metrics, nullptr);
  EXPECT_NE(std::find(metrics->rows[0].begin(), metrics->rows[0].end(), "0.38"), metrics->rows[0].end());  // 60 * 0.00625
}

TEST_F(Reports, ByteStable) {
  const auto& cfg = prepared_->cfg;
  const std::vector<std::string> ids{"oracle-text", "oracle-text-perm", "random-text"};
  EXPECT_EQ(cmd_report(cfg, ids, ReportFormat::Markdown), cmd_report(cfg, ids, ReportFormat::Markdown));
  EXPECT_EQ(cmd_report(cfg, ids, ReportFormat::Delimited), cmd_report(cfg, ids, ReportFormat::Delimited));
}

TEST_F(Reports, SignificanceAndContaminationTables) {
  const auto& cfg = prepared_->cfg;
  const auto report = build_report({load_run(cfg, "oracle-text"), load_run(cfg, "oracle-text-perm"), load_run(cfg, "random-text")},
                                   cfg.prices, {.bootstrap_samples = 500});
  const auto* sig = report.table("significance");
  ASSERT_NE(sig, nullptr);
  EXPECT_EQ(sig->rows.size(), 3u);
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(sig->columns.begin(), sig->columns.end(), name) - sig->columns.begin());
  };
  ASSERT_LT(col("Adjusted p"), sig->columns.size());
  ASSERT_LT(col("V"), sig->columns.size());
  const auto* cont = report.table("contamination");
  ASSERT_NE(cont, nullptr);
  ASSERT_EQ(cont->rows.size(), 1u);
  EXPECT_NE(std::find(cont->rows[0].begin(), cont->rows[0].end(), "identical"), cont->rows[0].end());
}

TEST_F(Reports, DelimitedRoundTrip) {
  const auto& cfg = prepared_->cfg;
  const auto report = build_report({load_run(cfg, "oracle-text"), load_run(cfg, "random-text")}, cfg.prices, {.bootstrap_samples = 500});
  EXPECT_EQ(parse_delimited(render_delimited(report)), report);
  Report odd{{{"t", "Ti\ttle", {"a", "b"}, {{"x\ty", "line\nbreak"}, {"back\\slash", ""}}}}};
  EXPECT_EQ(parse_delimited(render_delimited(odd)), odd);
  EXPECT_THROW(parse_delimited("a\tb\n"), SchemaError);
}

TEST_F(Reports, CompareDirections) {
  const auto& cfg = prepared_->cfg;
  const auto c = cmd_compare(cfg, "oracle-text", "random-text");
  EXPECT_TRUE(c.significant);
  EXPECT_EQ(c.direction, "random-text < oracle-text");
  EXPECT_FALSE(cmd_compare(cfg, "oracle-text", "oracle-text").significant);
  EXPECT_FALSE(cmd_compare(cfg, "oracle-text", "oracle-text-perm").significant);
  EXPECT_NE(render_comparison(c).find("random-text < oracle-text"), std::string::npos);
  EXPECT_THROW(cmd_report(cfg, {"nope"}, ReportFormat::Markdown), Error);
}

TEST(Report, Formatting) {
  EXPECT_EQ(format_interval(eval::agresti_coull_interval(497, 600)), "0.828 [0.796, 0.856]");
  EXPECT_EQ(format_interval(eval::agresti_coull_interval(240, 600)), "0.400 [0.362, 0.440]");
  EXPECT_EQ(format_p(0.0004), "<0.001");
  EXPECT_EQ(format_p(0.0123), "0.012");
  EXPECT_EQ(parse_report_format("delimited"), ReportFormat::Delimited);
  EXPECT_THROW(parse_report_format("xml"), ConfigError);
}

// ---- binary

TEST(Binary, ExitCodes) {
  TempDir dir("bin");
  const auto cfg = (fixture_dir() / "e2e_config.json").string();
  const auto data = (dir.path() / "data").string();
  const auto base = fmt::format("-q -c '{}' --data-dir '{}'", cfg, data);
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli(fmt::format("-c '{}' report x", (dir.path() / "missing.json").string())), 2);
  EXPECT_EQ(run_cli(fmt::format("{} --set store.kind=elastic index", base)), 2);
  EXPECT_EQ(run_cli(fmt::format("{} ingest '{}'", base, (fixture_dir() / "corpus").string())), 0);
  EXPECT_EQ(run_cli(fmt::format("{} index -k dense", base)), 0);
  TempDir empty("bin-empty");
  EXPECT_EQ(run_cli(fmt::format("{} ingest '{}'", base, empty.path().string())), 1);

  const auto spec = dir.path() / "spec.json";
  write_file(spec.string(), R"({"run_id": "smoke", "model": "oracle", "strategy": "text", "n_runs": 1})");
  EXPECT_EQ(run_cli(fmt::format("{} evaluate '{}'", base, spec.string())), 0);
  EXPECT_EQ(run_cli(fmt::format("{} report smoke -o '{}'", base, (dir.path() / "r.md").string())), 0);
  EXPECT_TRUE(fs::exists(dir.path() / "r.md"));
  EXPECT_EQ(run_cli(fmt::format("{} report unknown-run", base)), 1);

  write_file(spec.string(), R"({"run_id": "mm", "model": "oracle", "strategy": "multimodal"})");
  EXPECT_EQ(run_cli(fmt::format("{} evaluate '{}'", base, spec.string())), 2);
}
