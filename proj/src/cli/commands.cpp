#include "mmrag/cli/commands.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mmrag/errors.hpp"
#include "mmrag/gen/stubs.hpp"
#include "mmrag/index/qdrant_store.hpp"
#include "mmrag/ingest/parser.hpp"
#include "mmrag/ingest/pipeline.hpp"
#include "mmrag/util.hpp"

namespace mmrag::cli {

namespace fs = std::filesystem;

namespace {

nlohmann::json read_json(const fs::path& path) {
  auto j = nlohmann::json::parse(read_file(path.string()), nullptr, false);
  if (j.is_discarded()) throw SchemaError(fmt::format("'{}' is not valid JSON", path.string()));
  return j;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  fs::create_directories(path.parent_path());
  write_file(path.string(), j.dump(2) + "\n");
}

std::vector<fs::path> list_inputs(const fs::path& dir, std::string_view ext) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(fmt::format("input directory '{}' does not exist", dir.string()));
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && to_lower(e.path().extension().string()) == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

// ---- ingest

void to_json(nlohmann::json& j, const IngestManifest& m) {
  j = nlohmann::json{{"documents", nlohmann::json::array()}, {"failures", nlohmann::json::array()}};
  for (const auto& d : m.documents) {
    j["documents"].push_back({{"doc_id", d.doc_id},
                              {"pages", d.pages},
                              {"elements", d.elements},
                              {"chunks", d.chunks},
                              {"assets", d.assets},
                              {"summarized_assets", d.summarized_assets}});
  }
  for (const auto& f : m.failures) j["failures"].push_back({{"doc_id", f.doc_id}, {"error", f.error}});
}

void from_json(const nlohmann::json& j, IngestManifest& m) {
  m = {};
  for (const auto& d : j.at("documents")) {
    m.documents.push_back({d.at("doc_id").get<std::string>(), d.at("pages").get<std::size_t>(),
                           d.at("elements").get<std::size_t>(), d.at("chunks").get<std::size_t>(),
                           d.at("assets").get<std::size_t>(), d.at("summarized_assets").get<std::size_t>()});
  }
  for (const auto& f : j.value("failures", nlohmann::json::array())) {
    m.failures.push_back({f.at("doc_id").get<std::string>(), f.at("error").get<std::string>()});
  }
}

IngestManifest cmd_ingest(const AppConfig& cfg, const fs::path& input_dir) {
  std::unique_ptr<ingest::DocumentParser> base;
  std::unique_ptr<ingest::DocumentParser> recorder;
  std::vector<fs::path> inputs;
  if (cfg.parser.kind == "fixture") {
    base = std::make_unique<ingest::FixtureParser>((cfg.parser.fixture_dir.empty() ? input_dir : cfg.parser.fixture_dir).string());
    inputs = list_inputs(input_dir, ".json");
  } else {
    base = std::make_unique<ingest::DoclingServeParser>(cfg.parser.endpoint);
    inputs = list_inputs(input_dir, ".pdf");
  }
  const ingest::DocumentParser* parser = base.get();
  if (!cfg.parser.record_dir.empty()) {
    recorder = std::make_unique<ingest::RecordingParser>(*base, cfg.parser.record_dir.string());
    parser = recorder.get();
  }
  if (inputs.empty()) throw Error(fmt::format("no inputs in '{}'", input_dir.string()));

  std::unique_ptr<gen::Generator> summarizer;
  if (cfg.ingestion.summarize_assets && cfg.summarizer) summarizer = make_generator(cfg.model(*cfg.summarizer));

  IngestManifest manifest;
  for (const auto& path : inputs) {
    const auto doc_id = path.stem().string();
    try {
      const auto pdf = cfg.parser.kind == "fixture" ? std::string() : read_file(path.string());
      const auto doc = ingest::ingest_document(*parser, doc_id, pdf, cfg.ingestion, summarizer.get());
      write_json(cfg.corpus_dir() / (doc_id + ".json"), doc);
      IngestEntry e{doc_id, doc.document.pages.size(), doc.document.elements.size(), doc.chunks.size(),
                    doc.document.assets.size(), 0};
      for (const auto& a : doc.document.assets) e.summarized_assets += a.summary && !a.summary->text.empty();
      manifest.documents.push_back(e);
      spdlog::info("ingested '{}': {} pages, {} chunks, {} assets", doc_id, e.pages, e.chunks, e.assets);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      spdlog::warn("skipping '{}': {}", doc_id, ex.what());
      manifest.failures.push_back({doc_id, ex.what()});
    }
  }
  write_json(cfg.corpus_dir() / "manifest.json", manifest);
  if (manifest.documents.empty()) throw Error(fmt::format("all {} documents failed to ingest", inputs.size()));
  return manifest;
}

corpus::Corpus load_corpus(const AppConfig& cfg) {
  const auto manifest_path = cfg.corpus_dir() / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw ConfigError(fmt::format("no ingestion manifest at '{}'; run ingest first", manifest_path.string()));
  }
  const auto manifest = read_json(manifest_path).get<IngestManifest>();
  std::vector<corpus::IngestedDocument> docs;
  for (const auto& e : manifest.documents) {
    docs.push_back(read_json(cfg.corpus_dir() / (e.doc_id + ".json")).get<corpus::IngestedDocument>());
  }
  return corpus::Corpus(std::move(docs));
}

// ---- index

IndexKind IndexKind::parse(std::string_view s) {
  const auto lower = to_lower(trim(s));
  if (lower == "dense" || lower == "text") return {Kind::Dense, std::nullopt};
  if (lower == "multimodal" || lower == "multi-modal") return {Kind::MultiModal, std::nullopt};
  for (std::string_view prefix : {"late:", "pages:"}) {
    if (lower.rfind(prefix, 0) == 0) {
      if (const auto r = index::parse_retriever(std::string_view(lower).substr(prefix.size()))) {
        return {Kind::LateInteraction, *r};
      }
    }
  }
  throw ConfigError(fmt::format("unknown index kind '{}' (dense, multimodal, late:<colpali|colqwen|colflor>)", s));
}

std::vector<IndexKind> IndexKind::all() {
  return {{Kind::Dense, std::nullopt},
          {Kind::MultiModal, std::nullopt},
          {Kind::LateInteraction, index::RetrieverId::ColPali},
          {Kind::LateInteraction, index::RetrieverId::ColQwen},
          {Kind::LateInteraction, index::RetrieverId::ColFlor}};
}

std::string IndexKind::name() const {
  switch (kind) {
    case Kind::Dense: return "dense";
    case Kind::MultiModal: return "multimodal";
    case Kind::LateInteraction: return fmt::format("late:{}", index::to_string(*retriever));
  }
  return "dense";
}

void Backends::save(const AppConfig& cfg) const {
  if (const auto* mem = dynamic_cast<const index::MemoryVectorStore*>(store.get())) {
    fs::create_directories(cfg.index_dir());
    mem->save(cfg.index_dir().string());
  }
}

Backends open_backends(const AppConfig& cfg) {
  Backends b;
  if (cfg.store.kind == "qdrant") {
    b.store = std::make_unique<index::QdrantStore>(index::RemoteStoreEndpoint{cfg.store.url, cfg.store.api_key, cfg.store.timeout_s});
  } else {
    auto mem = std::make_unique<index::MemoryVectorStore>();
    if (fs::is_directory(cfg.index_dir())) mem->load(cfg.index_dir().string());
    b.store = std::move(mem);
  }
  if (cfg.embedder.kind == "service") {
    index::EmbedServiceEndpoint ep;
    ep.base_url = cfg.embedder.url;
    ep.api_key = cfg.embedder.api_key;
    ep.timeout_s = cfg.embedder.timeout_s;
    ep.dense_dim = cfg.embedder.dense_dim;
    ep.multivector_dim = cfg.embedder.multivector_dim;
    ep.max_image_side = cfg.ingestion.image_long_side_px;
    b.embedder = std::make_unique<index::EmbedServiceClient>(ep);
  } else {
    index::HashEmbedderOptions o;
    o.dense_dim = cfg.embedder.dense_dim;
    o.multivector_dim = cfg.embedder.multivector_dim;
    o.page_tokens = cfg.embedder.page_tokens;
    o.seed = cfg.embedder.seed;
    o.max_image_side = cfg.ingestion.image_long_side_px;
    b.embedder = std::make_unique<index::HashEmbedder>(o);
  }
  return b;
}

IndexStats cmd_index(const AppConfig& cfg, const IndexKind& kind, Backends& backends, const corpus::Corpus& corpus) {
  auto& store = *backends.store;
  const auto& embedder = *backends.embedder;
  IndexStats stats;
  stats.kind = kind.name();
  std::vector<index::IndexEntry> entries;
  if (kind.kind == IndexKind::Kind::LateInteraction) {
    stats.collection = cfg.collections.pages(*kind.retriever);
    store.create_collection(index::CollectionConfig::late_interaction(stats.collection, embedder.multivector_dim(*kind.retriever)));
    for (const auto& d : corpus.documents()) {
      for (const auto& page : d.document.pages) {
        entries.push_back({corpus::page_key(d.document.id, page.number), index::PageRef{d.document.id, page.number},
                           embedder.embed_page(page.image, *kind.retriever)});
        ++stats.page_entries;
      }
    }
  } else {
    const bool multimodal = kind.kind == IndexKind::Kind::MultiModal;
    stats.collection = multimodal ? cfg.collections.multimodal : cfg.collections.text;
    store.create_collection(index::CollectionConfig::dense(stats.collection, embedder.dense_dim()));
    for (const auto& d : corpus.documents()) {
      for (const auto& c : d.chunks) {
        entries.push_back({c.id, index::TextChunkRef{c.id}, embedder.embed_text(c.text)});
        ++stats.chunk_entries;
      }
      if (!multimodal) continue;
      for (const auto& a : d.document.assets) {
        if (!a.summary || a.summary->text.empty()) continue;
        entries.push_back({a.id, index::AssetRef{a.id}, embedder.embed_text(a.summary->text)});
        ++stats.asset_entries;
      }
    }
  }
  store.upsert(stats.collection, entries);
  stats.entries = store.size(stats.collection);
  spdlog::info("collection '{}' ({}): {} entries", stats.collection, stats.kind, stats.entries);
  return stats;
}

std::vector<IndexStats> cmd_index(const AppConfig& cfg, const std::vector<IndexKind>& kinds) {
  const auto corpus = load_corpus(cfg);
  auto backends = open_backends(cfg);
  std::vector<IndexStats> out;
  for (const auto& k : kinds) out.push_back(cmd_index(cfg, k, backends, corpus));
  backends.save(cfg);
  return out;
}

// ---- evaluate

std::unique_ptr<gen::Generator> make_generator(const ModelSection& model, const std::vector<corpus::BenchmarkItem>& items) {
  if (model.kind == "http") return std::make_unique<gen::ChatCompletionsClient>(model.generator);
  const gen::StubUsage usage{model.stub_prompt_tokens, model.stub_completion_tokens, 0.0};
  const auto& id = model.generator.model_id;
  if (model.stub == "oracle") return std::make_unique<gen::OracleGenerator>(items, usage, id);
  if (model.stub == "random") return std::make_unique<gen::RandomGuessGenerator>(model.stub_seed, usage, id);
  if (model.stub == "memorized") return std::make_unique<gen::MemorizedPositionGenerator>(items, usage, id);
  if (model.stub == "fixed") return std::make_unique<gen::FixedTextGenerator>(model.stub_text, usage, id);
  if (model.stub == "summary") return std::make_unique<gen::DigestSummaryGenerator>(usage, id);
  throw ConfigError(fmt::format("unknown stub '{}'", model.stub));
}

eval::RunSpec parse_run_spec(const AppConfig& cfg, nlohmann::json spec) {
  if (!spec.is_object()) throw ConfigError("run spec must be a JSON object");
  if (!spec.contains("k")) spec["k"] = cfg.defaults.k;
  if (!spec.contains("n_runs")) spec["n_runs"] = cfg.defaults.n_runs;
  if (!spec.contains("rng_seed")) spec["rng_seed"] = cfg.defaults.rng_seed;
  eval::RunSpec s;
  try {
    s = spec.get<eval::RunSpec>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("invalid run spec: {}", e.what()));
  }
  s.validate();
  cfg.model(s.model_id);
  return s;
}

namespace {

fs::path run_dir(const AppConfig& cfg, const std::string& run_id) { return cfg.runs_dir() / run_id; }

std::vector<corpus::BenchmarkItem> load_configured_benchmark(const AppConfig& cfg) {
  if (cfg.benchmark.empty()) throw ConfigError("no benchmark configured");
  if (!fs::exists(cfg.benchmark)) throw ConfigError(fmt::format("benchmark '{}' does not exist", cfg.benchmark.string()));
  return corpus::load_benchmark(cfg.benchmark.string());
}

}  // namespace

EvaluateOutcome cmd_evaluate(const AppConfig& cfg, const eval::RunSpec& spec, const EvaluateOptions& options) {
  spec.validate();
  const auto& model = cfg.model(spec.model_id);
  const auto items = load_configured_benchmark(cfg);
  const auto benchmark_sha = sha256_hex(read_file(cfg.benchmark.string()));

  using Kind = augment::AugmentationStrategy::Kind;
  std::optional<corpus::Corpus> corpus;
  Backends backends;
  augment::RetrievalIndexes indexes;
  nlohmann::json collections = nlohmann::json::object();
  if (spec.strategy.kind() != Kind::None) {
    corpus = load_corpus(cfg);
    backends = open_backends(cfg);
    indexes.store = backends.store.get();
    indexes.embedder = backends.embedder.get();
    indexes.corpus = &*corpus;
    indexes.text_collection = cfg.collections.text;
    indexes.multimodal_collection = cfg.collections.multimodal;
    for (const auto& k : IndexKind::all()) {
      if (k.retriever) indexes.page_collections[*k.retriever] = cfg.collections.pages(*k.retriever);
    }
    indexes.require(spec.strategy);
    collections = {{"text", cfg.collections.text},
                   {"multimodal", cfg.collections.multimodal},
                   {"pages_prefix", cfg.collections.pages_prefix}};
  }

  nlohmann::json identity{{"run", spec},
                          {"model", public_model_json(model)},
                          {"benchmark_sha256", benchmark_sha},
                          {"collections", collections}};
  const auto config_hash = sha256_hex(identity.dump());
  nlohmann::json manifest = identity;
  manifest["config_hash"] = config_hash;
  manifest["benchmark"] = cfg.benchmark.filename().string();
  manifest["n_items"] = items.size();
  manifest["expected_results"] = items.size() * static_cast<std::size_t>(spec.n_runs);

  const auto dir = run_dir(cfg, spec.run_id);
  const auto manifest_path = dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    const auto existing = read_json(manifest_path);
    if (existing.value("config_hash", std::string()) != config_hash) {
      throw ConfigError(fmt::format("run '{}' already exists with a different configuration", spec.run_id));
    }
  } else {
    write_json(manifest_path, manifest);
  }

  const auto generator = make_generator(model, items);
  eval::RunEnvironment env;
  env.generator = generator.get();
  env.indexes = spec.strategy.kind() == Kind::None ? nullptr : &indexes;
  env.limits.max_images = model.kind == "http" ? model.generator.max_images : env.limits.max_images;
  env.parallelism = model.parallelism;
  eval::RunOptions ro;
  ro.results_file = dir / "results.jsonl";
  ro.stop_after = options.stop_after;
  const auto results = eval::run_benchmark(items, spec, env, ro);

  EvaluateOutcome out{spec.run_id, results.size(), items.size() * static_cast<std::size_t>(spec.n_runs)};
  spdlog::info("run '{}': {}/{} results", out.run_id, out.total_results, out.expected_results);
  return out;
}

// ---- persisted runs

std::string RunRecord::label() const {
  auto s = fmt::format("{} / {}", spec.model_id, spec.strategy.label());
  if (spec.permute_answers) s += " / permuted";
  return s;
}

RunRecord load_run(const AppConfig& cfg, const std::string& run_id) {
  const auto dir = run_dir(cfg, run_id);
  if (run_id.empty() || !fs::exists(dir / "manifest.json")) throw Error(fmt::format("unknown run id '{}'", run_id));
  RunRecord r;
  r.manifest = read_json(dir / "manifest.json");
  r.spec = r.manifest.at("run").get<eval::RunSpec>();
  r.results = eval::load_results(dir / "results.jsonl");
  eval::sort_results(r.results);
  const auto expected = r.manifest.value("expected_results", std::size_t{0});
  if (r.results.size() != expected) {
    spdlog::warn("run '{}' is incomplete: {}/{} results", run_id, r.results.size(), expected);
  }
  return r;
}

// ---- compare

eval::PairedComparison cmd_compare(const AppConfig& cfg, const std::string& run_a, const std::string& run_b) {
  const auto a = load_run(cfg, run_a);
  const auto b = load_run(cfg, run_b);
  if (a.manifest.value("benchmark_sha256", std::string()) != b.manifest.value("benchmark_sha256", std::string())) {
    throw PreconditionError(fmt::format("runs '{}' and '{}' used different benchmarks", run_a, run_b));
  }
  return eval::compare_runs(run_a, a.results, run_b, b.results);
}

std::string render_comparison(const eval::PairedComparison& c) {
  return fmt::format(
      "{} vs {}\npairs: {} (differing: {})\nV: {}\np: {:.4g}{}\nadjusted p: {:.4g}\nsignificant: {}\ndirection: {}\n", c.a,
      c.b, c.n_pairs, c.n_effective, c.v, c.p, c.exact ? " (exact)" : "", c.p_adjusted, c.significant ? "yes" : "no",
      c.direction.value_or("none"));
}

}  // namespace mmrag::cli
