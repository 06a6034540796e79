#include "mmrag/corpus/corpus.hpp"

#include <fmt/format.h>

#include "mmrag/errors.hpp"

namespace mmrag::corpus {

void to_json(nlohmann::json& j, const IngestedDocument& d) {
  j = nlohmann::json{{"document", d.document}, {"chunks", d.chunks}};
}

void from_json(const nlohmann::json& j, IngestedDocument& d) {
  d.document = j.at("document").get<SourceDocument>();
  d.chunks = j.at("chunks").get<std::vector<Chunk>>();
}

Corpus::Corpus(std::vector<IngestedDocument> docs) : docs_(std::move(docs)) {
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    const auto& doc = docs_[d];
    if (!doc_index_.emplace(doc.document.id, d).second) {
      throw SchemaError(fmt::format("duplicate document id '{}'", doc.document.id));
    }
    for (std::size_t c = 0; c < doc.chunks.size(); ++c) {
      if (!chunks_.emplace(doc.chunks[c].id, std::pair{d, c}).second) {
        throw SchemaError(fmt::format("duplicate chunk id '{}'", doc.chunks[c].id));
      }
    }
    for (std::size_t a = 0; a < doc.document.assets.size(); ++a) {
      if (!assets_.emplace(doc.document.assets[a].id, std::pair{d, a}).second) {
        throw SchemaError(fmt::format("duplicate asset id '{}'", doc.document.assets[a].id));
      }
    }
  }
}

const SourceDocument* Corpus::document(const std::string& doc_id) const {
  const auto it = doc_index_.find(doc_id);
  return it == doc_index_.end() ? nullptr : &docs_[it->second].document;
}

const Chunk* Corpus::chunk(const std::string& chunk_id) const {
  const auto it = chunks_.find(chunk_id);
  return it == chunks_.end() ? nullptr : &docs_[it->second.first].chunks[it->second.second];
}

const VisualAsset* Corpus::asset(const std::string& asset_id) const {
  const auto it = assets_.find(asset_id);
  return it == assets_.end() ? nullptr : &docs_[it->second.first].document.assets[it->second.second];
}

const SourceDocument* Corpus::asset_document(const std::string& asset_id) const {
  const auto it = assets_.find(asset_id);
  return it == assets_.end() ? nullptr : &docs_[it->second.first].document;
}

const Page* Corpus::page(const std::string& doc_id, int number) const {
  const auto* doc = document(doc_id);
  if (doc == nullptr || number < 1 || number > static_cast<int>(doc->pages.size())) return nullptr;
  return &doc->pages[static_cast<std::size_t>(number - 1)];
}

std::size_t Corpus::page_count() const noexcept {
  std::size_t n = 0;
  for (const auto& d : docs_) n += d.document.pages.size();
  return n;
}

std::size_t Corpus::summarized_asset_count() const noexcept {
  std::size_t n = 0;
  for (const auto& d : docs_) {
    for (const auto& a : d.document.assets) {
      if (a.summary && !a.summary->text.empty()) ++n;
    }
  }
  return n;
}

}  // namespace mmrag::corpus
