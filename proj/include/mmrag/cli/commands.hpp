#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmrag/cli/config.hpp"
#include "mmrag/corpus/benchmark.hpp"
#include "mmrag/corpus/corpus.hpp"
#include "mmrag/eval/compare.hpp"
#include "mmrag/eval/runner.hpp"
#include "mmrag/gen/generator.hpp"
#include "mmrag/index/embedder.hpp"
#include "mmrag/index/store.hpp"

namespace mmrag::cli {

// ---- ingest

struct IngestEntry {
  std::string doc_id;
  std::size_t pages = 0;
  std::size_t elements = 0;
  std::size_t chunks = 0;
  std::size_t assets = 0;
  std::size_t summarized_assets = 0;
};

struct IngestFailure {
  std::string doc_id;
  std::string error;
};

struct IngestManifest {
  std::vector<IngestEntry> documents;
  std::vector<IngestFailure> failures;
};

void to_json(nlohmann::json& j, const IngestManifest& m);
void from_json(const nlohmann::json& j, IngestManifest& m);

/// Parses every input of `input_dir` (*.pdf for the http parser, *.json for fixtures),
/// persists the ingested documents under the data dir and returns the manifest.
/// Failed documents are logged and skipped; throws Error when there are no inputs or
/// every document failed.
IngestManifest cmd_ingest(const AppConfig& cfg, const std::filesystem::path& input_dir);

/// Loads the documents listed in the ingestion manifest.
corpus::Corpus load_corpus(const AppConfig& cfg);

// ---- index

struct IndexKind {
  enum class Kind { Dense, MultiModal, LateInteraction } kind = Kind::Dense;
  std::optional<index::RetrieverId> retriever;

  /// "dense", "multimodal", "late:<retriever>" (alias "pages:<retriever>").
  static IndexKind parse(std::string_view s);
  /// Dense, MultiModal and LateInteraction for every retriever.
  static std::vector<IndexKind> all();
  std::string name() const;
};

struct IndexStats {
  std::string collection;
  std::string kind;
  std::size_t entries = 0;
  std::size_t chunk_entries = 0;
  std::size_t asset_entries = 0;
  std::size_t page_entries = 0;
};

/// Opened backends; the memory store is loaded from and saved to the data dir.
struct Backends {
  std::unique_ptr<index::VectorStore> store;
  std::unique_ptr<index::Embedder> embedder;

  /// Persists a memory store; no-op for remote stores.
  void save(const AppConfig& cfg) const;
};

Backends open_backends(const AppConfig& cfg);

IndexStats cmd_index(const AppConfig& cfg, const IndexKind& kind, Backends& backends, const corpus::Corpus& corpus);
std::vector<IndexStats> cmd_index(const AppConfig& cfg, const std::vector<IndexKind>& kinds);

// ---- evaluate

/// Generator for a configured model; stubs that need the benchmark get `items`.
std::unique_ptr<gen::Generator> make_generator(const ModelSection& model,
                                               const std::vector<corpus::BenchmarkItem>& items = {});

/// Fills absent k / n_runs / rng_seed from the config defaults and parses the spec.
eval::RunSpec parse_run_spec(const AppConfig& cfg, nlohmann::json spec);

struct EvaluateOptions {
  /// Stop after this many new results (simulated interrupt).
  std::optional<std::size_t> stop_after;
};

struct EvaluateOutcome {
  std::string run_id;
  std::size_t total_results = 0;
  std::size_t expected_results = 0;
};

/// Runs (or resumes) `spec`; results and manifest go to <data_dir>/runs/<run_id>/.
/// A run id reused with a different configuration is a configuration error.
EvaluateOutcome cmd_evaluate(const AppConfig& cfg, const eval::RunSpec& spec, const EvaluateOptions& options = {});

// ---- persisted runs

struct RunRecord {
  nlohmann::json manifest;
  eval::RunSpec spec;
  std::vector<eval::ItemResult> results;

  /// "<model> / <strategy label>", with " / permuted" when answers were shuffled.
  std::string label() const;
};

/// Throws Error("unknown run id ...") when the run does not exist.
RunRecord load_run(const AppConfig& cfg, const std::string& run_id);

// ---- compare

/// Wilcoxon comparison of two runs over the same benchmark; labels are the run ids.
/// Throws PreconditionError when the runs used different benchmarks.
eval::PairedComparison cmd_compare(const AppConfig& cfg, const std::string& run_a, const std::string& run_b);

std::string render_comparison(const eval::PairedComparison& c);

}  // namespace mmrag::cli
