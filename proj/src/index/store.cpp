#include "mmrag/index/store.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "mmrag/errors.hpp"
#include "mmrag/index/maxsim.hpp"
#include "mmrag/util.hpp"

namespace mmrag::index {

namespace fs = std::filesystem;

std::string_view to_string(CollectionKind k) noexcept {
  return k == CollectionKind::Dense ? "dense" : "late_interaction";
}

std::string_view to_string(Metric m) noexcept { return m == Metric::Cosine ? "cosine" : "dot"; }

CollectionConfig CollectionConfig::dense(std::string name, std::size_t dim) {
  return {std::move(name), CollectionKind::Dense, dim, Metric::Cosine};
}

CollectionConfig CollectionConfig::late_interaction(std::string name, std::size_t dim) {
  return {std::move(name), CollectionKind::LateInteraction, dim, Metric::Dot};
}

void to_json(nlohmann::json& j, const Payload& p) {
  std::visit(
      [&j](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TextChunkRef>) {
          j = {{"type", "text_chunk"}, {"chunk_id", v.chunk_id}};
        } else if constexpr (std::is_same_v<T, PageRef>) {
          j = {{"type", "page"}, {"doc_id", v.doc_id}, {"page", v.page}};
        } else {
          j = {{"type", "asset"}, {"asset_id", v.asset_id}};
        }
      },
      p);
}

void from_json(const nlohmann::json& j, Payload& p) {
  const auto type = j.at("type").get<std::string>();
  if (type == "text_chunk") {
    p = TextChunkRef{j.at("chunk_id").get<std::string>()};
  } else if (type == "page") {
    p = PageRef{j.at("doc_id").get<std::string>(), j.at("page").get<int>()};
  } else if (type == "asset") {
    p = AssetRef{j.at("asset_id").get<std::string>()};
  } else {
    throw SchemaError(fmt::format("unknown payload type '{}'", type));
  }
}

bool hit_before(const SearchHit& a, const SearchHit& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  return a.key < b.key;
}

void check_upsert_batch(const CollectionConfig& cfg, const std::vector<IndexEntry>& entries) {
  std::set<std::string> seen;
  std::vector<std::string> duplicates;
  std::vector<std::string> bad;
  for (const auto& e : entries) {
    if (!seen.insert(e.key).second) duplicates.push_back(e.key);
    const bool dense = std::holds_alternative<DenseVector>(e.embedding);
    const bool kind_ok = dense == (cfg.kind == CollectionKind::Dense);
    const std::size_t dim = dense ? std::get<DenseVector>(e.embedding).dim()
                                  : std::get<MultiVector>(e.embedding).dim();
    if (!kind_ok || dim != cfg.dim || e.key.empty()) bad.push_back(e.key);
  }
  if (!duplicates.empty()) {
    throw PreconditionError(fmt::format("duplicate keys in upsert batch for '{}': {}", cfg.name,
                                        fmt::join(duplicates, ", ")));
  }
  if (!bad.empty()) {
    throw PreconditionError(fmt::format("entries do not match collection '{}' ({} dim {}): {}", cfg.name,
                                        to_string(cfg.kind), cfg.dim, fmt::join(bad, ", ")));
  }
}

void MemoryVectorStore::create_collection(const CollectionConfig& cfg) {
  if (cfg.dim == 0) throw ConfigError(fmt::format("collection '{}' needs dim >= 1", cfg.name));
  std::lock_guard lock(writer_);
  const auto it = collections_.find(cfg.name);
  if (it != collections_.end()) {
    if (!(it->second.current->config == cfg)) {
      throw ConfigError(fmt::format("collection '{}' exists with a different config", cfg.name));
    }
    return;
  }
  collections_[cfg.name].current = std::make_shared<const Snapshot>(Snapshot{cfg, {}});
}

bool MemoryVectorStore::has_collection(const std::string& name) const {
  std::lock_guard lock(writer_);
  return collections_.count(name) != 0;
}

std::shared_ptr<const MemoryVectorStore::Snapshot> MemoryVectorStore::snapshot(const std::string& name) const {
  std::lock_guard lock(writer_);
  const auto it = collections_.find(name);
  if (it == collections_.end()) throw ConfigError(fmt::format("unknown collection '{}'", name));
  return it->second.current;
}

CollectionConfig MemoryVectorStore::collection_config(const std::string& name) const {
  return snapshot(name)->config;
}

std::size_t MemoryVectorStore::upsert(const std::string& collection, const std::vector<IndexEntry>& entries) {
  const auto base = snapshot(collection);
  check_upsert_batch(base->config, entries);
  auto next = std::make_shared<Snapshot>(*base);
  for (const auto& e : entries) next->entries.insert_or_assign(e.key, e);
  std::lock_guard lock(writer_);
  collections_[collection].current = std::move(next);
  return entries.size();
}

std::size_t MemoryVectorStore::size(const std::string& collection) const {
  return snapshot(collection)->entries.size();
}

namespace {

std::vector<SearchHit> top_k(std::vector<SearchHit> hits, std::size_t k) {
  const std::size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), hit_before);
  hits.resize(n);
  return hits;
}

}  // namespace

std::vector<SearchHit> MemoryVectorStore::search_dense(const std::string& collection, const DenseVector& query,
                                                       std::size_t k) const {
  if (k < 1) throw PreconditionError("k must be >= 1");
  const auto snap = snapshot(collection);
  const auto& cfg = snap->config;
  if (cfg.kind != CollectionKind::Dense) {
    throw ConfigError(fmt::format("collection '{}' is not a dense collection", collection));
  }
  if (query.dim() != cfg.dim) {
    throw ConfigError(fmt::format("query dim {} does not match collection '{}' dim {}", query.dim(),
                                  collection, cfg.dim));
  }
  std::vector<SearchHit> hits;
  hits.reserve(snap->entries.size());
  for (const auto& [key, e] : snap->entries) {
    const auto& v = std::get<DenseVector>(e.embedding);
    const double s = cfg.metric == Metric::Cosine ? cosine(query, v) : dot(query.values(), v.values());
    hits.push_back({key, s, e.payload});
  }
  return top_k(std::move(hits), k);
}

std::vector<SearchHit> MemoryVectorStore::search_late_interaction(const std::string& collection,
                                                                  const MultiVector& query,
                                                                  std::size_t k) const {
  if (k < 1) throw PreconditionError("k must be >= 1");
  const auto snap = snapshot(collection);
  const auto& cfg = snap->config;
  if (cfg.kind != CollectionKind::LateInteraction) {
    throw ConfigError(fmt::format("collection '{}' is not a late-interaction collection", collection));
  }
  if (query.dim() != cfg.dim) {
    throw PreconditionError(fmt::format("query dim {} does not match collection '{}' dim {}", query.dim(),
                                        collection, cfg.dim));
  }
  std::vector<SearchHit> hits;
  hits.reserve(snap->entries.size());
  for (const auto& [key, e] : snap->entries) {
    hits.push_back({key, maxsim_score(query, std::get<MultiVector>(e.embedding)), e.payload});
  }
  return top_k(std::move(hits), k);
}

std::optional<IndexEntry> MemoryVectorStore::get(const std::string& collection, const std::string& key) const {
  const auto snap = snapshot(collection);
  const auto it = snap->entries.find(key);
  if (it == snap->entries.end()) return std::nullopt;
  return it->second;
}

void MemoryVectorStore::save(const std::string& dir) const {
  fs::create_directories(dir);
  std::map<std::string, std::shared_ptr<const Snapshot>> snaps;
  {
    std::lock_guard lock(writer_);
    for (const auto& [name, c] : collections_) snaps.emplace(name, c.current);
  }
  for (const auto& [name, snap] : snaps) {
    nlohmann::json j;
    j["name"] = name;
    j["kind"] = to_string(snap->config.kind);
    j["dim"] = snap->config.dim;
    j["metric"] = to_string(snap->config.metric);
    auto entries = nlohmann::json::array();
    for (const auto& [key, e] : snap->entries) {
      nlohmann::json je{{"key", key}, {"payload", e.payload}};
      std::visit([&je](const auto& emb) { je["embedding"] = emb; }, e.embedding);
      entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    write_file((fs::path(dir) / (name + ".collection.json")).string(), j.dump());
  }
}

void MemoryVectorStore::load(const std::string& dir) {
  if (!fs::is_directory(dir)) return;
  std::vector<fs::path> files;
  for (const auto& f : fs::directory_iterator(dir)) {
    const auto name = f.path().filename().string();
    if (name.size() > 16 && name.ends_with(".collection.json")) files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const auto j = nlohmann::json::parse(read_file(path.string()));
    CollectionConfig cfg;
    cfg.name = j.at("name").get<std::string>();
    cfg.kind = j.at("kind").get<std::string>() == "dense" ? CollectionKind::Dense : CollectionKind::LateInteraction;
    cfg.dim = j.at("dim").get<std::size_t>();
    cfg.metric = j.at("metric").get<std::string>() == "cosine" ? Metric::Cosine : Metric::Dot;
    create_collection(cfg);
    std::vector<IndexEntry> entries;
    for (const auto& je : j.at("entries")) {
      IndexEntry e{je.at("key").get<std::string>(), je.at("payload").get<Payload>(), DenseVector{}};
      if (cfg.kind == CollectionKind::Dense) {
        e.embedding = je.at("embedding").get<DenseVector>();
      } else {
        e.embedding = je.at("embedding").get<MultiVector>();
      }
      entries.push_back(std::move(e));
    }
    upsert(cfg.name, entries);
  }
}

}  // namespace mmrag::index
