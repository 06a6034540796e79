#pragma once

#include <map>
#include <string>
#include <vector>

#include "mmrag/corpus/types.hpp"

namespace mmrag::corpus {

/// An ingested document with its chunks.
struct IngestedDocument {
  SourceDocument document;
  std::vector<Chunk> chunks;
};

void to_json(nlohmann::json& j, const IngestedDocument& d);
void from_json(const nlohmann::json& j, IngestedDocument& d);

/// Read-only lookup over all ingested documents. Built once, then shared.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<IngestedDocument> docs);

  const std::vector<IngestedDocument>& documents() const noexcept { return docs_; }

  const SourceDocument* document(const std::string& doc_id) const;
  const Chunk* chunk(const std::string& chunk_id) const;
  const VisualAsset* asset(const std::string& asset_id) const;
  /// Document that owns the asset.
  const SourceDocument* asset_document(const std::string& asset_id) const;
  const Page* page(const std::string& doc_id, int number) const;

  std::size_t chunk_count() const noexcept { return chunks_.size(); }
  std::size_t page_count() const noexcept;
  std::size_t summarized_asset_count() const noexcept;

 private:
  std::vector<IngestedDocument> docs_;
  std::map<std::string, std::size_t> doc_index_;
  std::map<std::string, std::pair<std::size_t, std::size_t>> chunks_;
  std::map<std::string, std::pair<std::size_t, std::size_t>> assets_;
};

}  // namespace mmrag::corpus
