#pragma once

#include <memory>
#include <string>

#include "mmrag/index/store.hpp"

namespace mmrag::index {

struct RemoteStoreEndpoint {
  std::string base_url;  // e.g. http://localhost:6333
  std::string api_key;   // sent as the "api-key" header when non-empty
  double timeout_s = 30.0;
};

/// Client for a Qdrant-compatible REST store. Late-interaction collections use the
/// store's multi-vector points with the max_sim comparator. String keys are mapped to
/// deterministic UUID point ids; the key travels in the point payload.
///
/// The remote engine may approximate; results are re-sorted by (score desc, key asc).
class QdrantStore final : public VectorStore {
 public:
  explicit QdrantStore(RemoteStoreEndpoint endpoint);
  ~QdrantStore() override;

  void create_collection(const CollectionConfig& cfg) override;
  bool has_collection(const std::string& name) const override;
  CollectionConfig collection_config(const std::string& name) const override;
  std::size_t upsert(const std::string& collection, const std::vector<IndexEntry>& entries) override;
  std::size_t size(const std::string& collection) const override;
  std::vector<SearchHit> search_dense(const std::string& collection, const DenseVector& query,
                                      std::size_t k) const override;
  std::vector<SearchHit> search_late_interaction(const std::string& collection, const MultiVector& query,
                                                 std::size_t k) const override;

  /// Deterministic UUID (RFC 4122 layout, version 5-style bits) derived from the key.
  static std::string point_id(std::string_view key);

  /// Points per upsert request.
  std::size_t batch_size = 256;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mmrag::index
