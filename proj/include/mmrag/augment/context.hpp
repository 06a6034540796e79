#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmrag/corpus/corpus.hpp"
#include "mmrag/index/embedder.hpp"
#include "mmrag/index/store.hpp"

namespace mmrag::augment {

/// What evidence accompanies the question.
class AugmentationStrategy {
 public:
  enum class Kind { None, Text, MultiModal, VisualPages };

  static AugmentationStrategy none() { return AugmentationStrategy(Kind::None, std::nullopt); }
  static AugmentationStrategy text() { return AugmentationStrategy(Kind::Text, std::nullopt); }
  static AugmentationStrategy multimodal() { return AugmentationStrategy(Kind::MultiModal, std::nullopt); }
  static AugmentationStrategy visual_pages(index::RetrieverId r) { return AugmentationStrategy(Kind::VisualPages, r); }

  /// "none", "text", "multimodal", "visual:<retriever>". Throws ConfigError otherwise.
  static AugmentationStrategy parse(std::string_view s);

  Kind kind() const noexcept { return kind_; }
  /// Set exactly when kind() == VisualPages.
  std::optional<index::RetrieverId> retriever() const noexcept { return retriever_; }
  /// Inverse of parse.
  std::string name() const;
  /// Human label for reports: None, Text, Multi-modal, ColPali, ...
  std::string label() const;

  friend bool operator==(const AugmentationStrategy&, const AugmentationStrategy&) = default;

 private:
  AugmentationStrategy(Kind k, std::optional<index::RetrieverId> r) : kind_(k), retriever_(r) {}
  Kind kind_;
  std::optional<index::RetrieverId> retriever_;
};

struct Snippet {
  std::string chunk_id;
  std::string text;
  double score = 0.0;
};

struct ImageEvidence {
  std::string ref_id;  // page key or asset id
  corpus::PageImage image;
  double score = 0.0;
};

struct SummaryEvidence {
  std::string asset_id;
  corpus::Summary summary;
  double score = 0.0;
};

struct TraceEntry {
  std::string key;
  double score = 0.0;
  /// Page the hit lives on ("doc_id#page"), used for retrieval precision.
  std::string page_key;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct ContextBundle {
  std::vector<Snippet> text_snippets;
  std::vector<ImageEvidence> images;
  std::vector<SummaryEvidence> summaries;
  std::vector<TraceEntry> retrieval_trace;

  bool empty() const noexcept {
    return text_snippets.empty() && images.empty() && summaries.empty() && retrieval_trace.empty();
  }
};

/// Every per-strategy emptiness invariant `bundle` violates.
std::vector<std::string> check_bundle(const ContextBundle& bundle, const AugmentationStrategy& strategy);

/// Indexes and lookups the strategies retrieve from.
struct RetrievalIndexes {
  const index::VectorStore* store = nullptr;
  const index::Embedder* embedder = nullptr;
  const corpus::Corpus* corpus = nullptr;
  /// Dense collection over chunks.
  std::optional<std::string> text_collection;
  /// Dense collection over chunks plus asset summaries.
  std::optional<std::string> multimodal_collection;
  /// Late-interaction page collections per retriever.
  std::map<index::RetrieverId, std::string> page_collections;

  /// Throws ConfigError when the collection `strategy` needs is not configured or absent.
  void require(const AugmentationStrategy& strategy) const;
};

/// Retrieves the top-k evidence for `item` under `strategy`. The question text is the
/// retrieval query.
ContextBundle build_context(const corpus::BenchmarkItem& item, const AugmentationStrategy& strategy,
                            const RetrievalIndexes& indexes, std::size_t k);

}  // namespace mmrag::augment
