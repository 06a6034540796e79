#include "mmrag/augment/context.hpp"

#include <fmt/format.h>

#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

namespace mmrag::augment {

AugmentationStrategy AugmentationStrategy::parse(std::string_view s) {
  const auto lower = to_lower(trim(s));
  if (lower == "none") return none();
  if (lower == "text") return text();
  if (lower == "multimodal" || lower == "multi-modal") return multimodal();
  if (lower.rfind("visual:", 0) == 0) {
    if (const auto r = index::parse_retriever(std::string_view(lower).substr(7))) return visual_pages(*r);
  }
  throw ConfigError(fmt::format("unknown augmentation strategy '{}'", s));
}

std::string AugmentationStrategy::name() const {
  switch (kind_) {
    case Kind::None: return "none";
    case Kind::Text: return "text";
    case Kind::MultiModal: return "multimodal";
    case Kind::VisualPages: return fmt::format("visual:{}", index::to_string(*retriever_));
  }
  return "none";
}

std::string AugmentationStrategy::label() const {
  switch (kind_) {
    case Kind::None: return "None";
    case Kind::Text: return "Text";
    case Kind::MultiModal: return "Multi-modal";
    case Kind::VisualPages:
      switch (*retriever_) {
        case index::RetrieverId::ColPali: return "ColPali";
        case index::RetrieverId::ColQwen: return "ColQwen";
        case index::RetrieverId::ColFlor: return "ColFlor";
      }
  }
  return "None";
}

std::vector<std::string> check_bundle(const ContextBundle& b, const AugmentationStrategy& strategy) {
  std::vector<std::string> v;
  using Kind = AugmentationStrategy::Kind;
  switch (strategy.kind()) {
    case Kind::None:
      if (!b.empty()) v.emplace_back("None strategy produced evidence");
      break;
    case Kind::Text:
      if (!b.images.empty()) v.emplace_back("Text strategy produced images");
      if (!b.summaries.empty()) v.emplace_back("Text strategy produced summaries");
      break;
    case Kind::VisualPages:
      if (!b.text_snippets.empty()) v.emplace_back("VisualPages strategy produced text snippets");
      if (!b.summaries.empty()) v.emplace_back("VisualPages strategy produced summaries");
      break;
    case Kind::MultiModal:
      break;
  }
  for (std::size_t i = 1; i < b.retrieval_trace.size(); ++i) {
    if (b.retrieval_trace[i].score > b.retrieval_trace[i - 1].score) {
      v.emplace_back("retrieval trace scores increase");
      break;
    }
  }
  return v;
}

void RetrievalIndexes::require(const AugmentationStrategy& strategy) const {
  using Kind = AugmentationStrategy::Kind;
  if (strategy.kind() == Kind::None) return;
  if (store == nullptr || embedder == nullptr || corpus == nullptr) {
    throw ConfigError(fmt::format("strategy '{}' needs a vector store, an embedder and a corpus", strategy.name()));
  }
  std::optional<std::string> name;
  if (strategy.kind() == Kind::Text) name = text_collection;
  if (strategy.kind() == Kind::MultiModal) name = multimodal_collection;
  if (strategy.kind() == Kind::VisualPages) {
    const auto it = page_collections.find(*strategy.retriever());
    if (it != page_collections.end()) name = it->second;
  }
  if (!name) throw ConfigError(fmt::format("no collection configured for strategy '{}'", strategy.name()));
  if (!store->has_collection(*name)) {
    throw ConfigError(fmt::format("collection '{}' for strategy '{}' does not exist", *name, strategy.name()));
  }
}

namespace {

std::string page_of_hit(const index::SearchHit& hit, const corpus::Corpus& lookup) {
  return std::visit(
      [&lookup](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, index::PageRef>) {
          return corpus::page_key(p.doc_id, p.page);
        } else if constexpr (std::is_same_v<T, index::TextChunkRef>) {
          const auto* c = lookup.chunk(p.chunk_id);
          return c == nullptr ? std::string() : corpus::page_key(c->doc_id, c->page);
        } else {
          const auto* a = lookup.asset(p.asset_id);
          const auto* d = lookup.asset_document(p.asset_id);
          return a == nullptr || d == nullptr ? std::string() : corpus::page_key(d->id, a->page);
        }
      },
      hit.payload);
}

const corpus::Chunk& chunk_or_throw(const corpus::Corpus& lookup, const std::string& id) {
  const auto* c = lookup.chunk(id);
  if (c == nullptr) throw ConfigError(fmt::format("index references unknown chunk '{}'", id));
  return *c;
}

}  // namespace

ContextBundle build_context(const corpus::BenchmarkItem& item, const AugmentationStrategy& strategy,
                            const RetrievalIndexes& indexes, std::size_t k) {
  if (k < 1) throw PreconditionError("k must be >= 1");
  ContextBundle bundle;
  using Kind = AugmentationStrategy::Kind;
  if (strategy.kind() == Kind::None) return bundle;
  indexes.require(strategy);
  const auto& lookup = *indexes.corpus;

  std::vector<index::SearchHit> hits;
  if (strategy.kind() == Kind::VisualPages) {
    const auto query = indexes.embedder->embed_query(item.question, *strategy.retriever());
    hits = indexes.store->search_late_interaction(indexes.page_collections.at(*strategy.retriever()), query, k);
  } else {
    const auto query = indexes.embedder->embed_text(item.question);
    const auto& coll = strategy.kind() == Kind::Text ? *indexes.text_collection : *indexes.multimodal_collection;
    hits = indexes.store->search_dense(coll, query, k);
  }

  for (const auto& hit : hits) {
    bundle.retrieval_trace.push_back({hit.key, hit.score, page_of_hit(hit, lookup)});
    if (const auto* chunk_ref = std::get_if<index::TextChunkRef>(&hit.payload)) {
      if (strategy.kind() == Kind::VisualPages) continue;
      const auto& c = chunk_or_throw(lookup, chunk_ref->chunk_id);
      bundle.text_snippets.push_back({c.id, c.text, hit.score});
    } else if (const auto* page_ref = std::get_if<index::PageRef>(&hit.payload)) {
      const auto* page = lookup.page(page_ref->doc_id, page_ref->page);
      if (page == nullptr) throw ConfigError(fmt::format("index references unknown page '{}'", hit.key));
      bundle.images.push_back({hit.key, page->image, hit.score});
    } else if (const auto* asset_ref = std::get_if<index::AssetRef>(&hit.payload)) {
      if (strategy.kind() != Kind::MultiModal) continue;
      const auto* a = lookup.asset(asset_ref->asset_id);
      if (a == nullptr) throw ConfigError(fmt::format("index references unknown asset '{}'", asset_ref->asset_id));
      bundle.images.push_back({a->id, a->image, hit.score});
      bundle.summaries.push_back({a->id, a->summary.value_or(corpus::Summary{}), hit.score});
    }
  }
  return bundle;
}

}  // namespace mmrag::augment
