#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmrag/eval/metrics.hpp"
#include "mmrag/gen/generator.hpp"
#include "mmrag/index/vectors.hpp"
#include "mmrag/ingest/config.hpp"

namespace mmrag::cli {

struct ParserSection {
  std::string kind = "fixture";  // fixture | http
  std::filesystem::path fixture_dir;  // fixture: where <doc_id>.json responses live (default: the input dir)
  ingest::ParserEndpoint endpoint;
  std::filesystem::path record_dir;  // http: save raw responses here when set
};

struct StoreSection {
  std::string kind = "memory";  // memory | qdrant
  std::string url;
  std::string api_key;
  double timeout_s = 30.0;
};

struct EmbedderSection {
  std::string kind = "hash";  // hash | service
  std::string url;
  std::string api_key;
  double timeout_s = 60.0;
  std::size_t dense_dim = index::kDefaultDenseDim;
  std::size_t multivector_dim = index::kDefaultMultiVectorDim;
  std::size_t page_tokens = 4;
  std::uint64_t seed = 0;
};

struct ModelSection {
  std::string kind = "http";  // http | stub
  /// stub kinds: oracle | random | memorized | fixed | summary
  std::string stub;
  std::string stub_text;
  std::optional<std::size_t> stub_prompt_tokens;
  std::size_t stub_completion_tokens = 7;
  std::uint64_t stub_seed = 0;
  gen::GeneratorConfig generator;
  std::size_t parallelism = 4;
};

struct Collections {
  std::string text = "text_chunks";
  std::string multimodal = "multimodal_chunks";
  std::string pages_prefix = "pages_";

  std::string pages(index::RetrieverId r) const;
};

struct Defaults {
  std::size_t k = 5;
  int n_runs = 5;
  std::uint64_t rng_seed = 0;
  std::size_t bootstrap_samples = 10000;
  std::uint64_t bootstrap_seed = 0;
};

struct AppConfig {
  std::filesystem::path data_dir = "mmrag-data";
  std::filesystem::path benchmark;
  ParserSection parser;
  StoreSection store;
  EmbedderSection embedder;
  Collections collections;
  ingest::IngestionConfig ingestion;
  /// Model used to summarize assets during ingestion; must name an entry of `models`.
  std::optional<std::string> summarizer;
  std::map<std::string, ModelSection> models;
  eval::PriceTable prices;
  Defaults defaults;

  std::filesystem::path corpus_dir() const { return data_dir / "corpus"; }
  std::filesystem::path index_dir() const { return data_dir / "index"; }
  std::filesystem::path runs_dir() const { return data_dir / "runs"; }

  const ModelSection& model(const std::string& name) const;
  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// Replaces ${NAME} and ${NAME:-fallback} with environment values; an unset variable
/// without fallback becomes empty.
std::string interpolate_env(std::string_view text);

/// Sets a dotted path ("store.kind", "models.gpt.generator.retries") to `value`; the value
/// is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Parses a config document. Relative paths resolve against `base_dir`.
AppConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Reads `path` (if given), interpolates the environment, applies `overrides` and parses.
AppConfig load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides = {});

/// Config of a model without secrets, as recorded in run manifests.
nlohmann::json public_model_json(const ModelSection& m);

}  // namespace mmrag::cli
