#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mmrag/index/vectors.hpp"

namespace mmrag::index {

enum class CollectionKind { Dense, LateInteraction };
enum class Metric { Cosine, Dot };

std::string_view to_string(CollectionKind k) noexcept;
std::string_view to_string(Metric m) noexcept;

struct CollectionConfig {
  std::string name;
  CollectionKind kind = CollectionKind::Dense;
  std::size_t dim = kDefaultDenseDim;
  Metric metric = Metric::Cosine;

  /// Dense -> Cosine, LateInteraction -> Dot.
  static CollectionConfig dense(std::string name, std::size_t dim = kDefaultDenseDim);
  static CollectionConfig late_interaction(std::string name, std::size_t dim = kDefaultMultiVectorDim);

  friend bool operator==(const CollectionConfig&, const CollectionConfig&) = default;
};

struct TextChunkRef {
  std::string chunk_id;
  friend bool operator==(const TextChunkRef&, const TextChunkRef&) = default;
};
struct PageRef {
  std::string doc_id;
  int page = 1;
  friend bool operator==(const PageRef&, const PageRef&) = default;
};
struct AssetRef {
  std::string asset_id;
  friend bool operator==(const AssetRef&, const AssetRef&) = default;
};

using Payload = std::variant<TextChunkRef, PageRef, AssetRef>;
using Embedding = std::variant<DenseVector, MultiVector>;

struct IndexEntry {
  std::string key;
  Payload payload;
  Embedding embedding;
};

struct SearchHit {
  std::string key;
  double score = 0.0;
  Payload payload;
};

void to_json(nlohmann::json& j, const Payload& p);
void from_json(const nlohmann::json& j, Payload& p);

/// Orders hits by descending score, then ascending key.
bool hit_before(const SearchHit& a, const SearchHit& b) noexcept;

/// Storage + search over named collections.
class VectorStore {
 public:
  virtual ~VectorStore() = default;

  /// Creating an existing collection with an identical config is a no-op;
  /// a conflicting config throws ConfigError.
  virtual void create_collection(const CollectionConfig& cfg) = 0;
  virtual bool has_collection(const std::string& name) const = 0;
  virtual CollectionConfig collection_config(const std::string& name) const = 0;

  /// Stores the batch; re-upserting an existing key replaces it. Returns the batch size.
  /// Throws PreconditionError (listing offending keys) on duplicate keys, kind or dim mismatch.
  virtual std::size_t upsert(const std::string& collection, const std::vector<IndexEntry>& entries) = 0;
  virtual std::size_t size(const std::string& collection) const = 0;

  virtual std::vector<SearchHit> search_dense(const std::string& collection, const DenseVector& query,
                                              std::size_t k) const = 0;
  virtual std::vector<SearchHit> search_late_interaction(const std::string& collection,
                                                         const MultiVector& query,
                                                         std::size_t k) const = 0;
};

/// Checks batch-level upsert preconditions shared by every backend.
void check_upsert_batch(const CollectionConfig& cfg, const std::vector<IndexEntry>& entries);

/// Exhaustive-scan reference engine. Single writer; readers copy the current snapshot
/// pointer and search it without holding any lock. An upsert builds a new snapshot and
/// swaps it in on commit.
class MemoryVectorStore final : public VectorStore {
 public:
  void create_collection(const CollectionConfig& cfg) override;
  bool has_collection(const std::string& name) const override;
  CollectionConfig collection_config(const std::string& name) const override;
  std::size_t upsert(const std::string& collection, const std::vector<IndexEntry>& entries) override;
  std::size_t size(const std::string& collection) const override;
  std::vector<SearchHit> search_dense(const std::string& collection, const DenseVector& query,
                                      std::size_t k) const override;
  std::vector<SearchHit> search_late_interaction(const std::string& collection, const MultiVector& query,
                                                 std::size_t k) const override;

  std::optional<IndexEntry> get(const std::string& collection, const std::string& key) const;

  /// One JSON file per collection under `dir`.
  void save(const std::string& dir) const;
  void load(const std::string& dir);

 private:
  struct Snapshot {
    CollectionConfig config;
    std::map<std::string, IndexEntry> entries;
  };
  struct Collection {
    std::shared_ptr<const Snapshot> current;
  };

  std::shared_ptr<const Snapshot> snapshot(const std::string& name) const;

  mutable std::mutex writer_;
  std::map<std::string, Collection> collections_;
};

}  // namespace mmrag::index
