#include "mmrag/ingest/pipeline.hpp"

#include "mmrag/ingest/chunker.hpp"
#include "mmrag/ingest/image.hpp"
#include "mmrag/ingest/summarizer.hpp"

namespace mmrag::ingest {

corpus::IngestedDocument ingest_document(const DocumentParser& parser, std::string_view doc_id,
                                         std::string_view pdf, const IngestionConfig& cfg,
                                         const gen::Generator* summarizer, const corpus::Tokenizer& tokenizer) {
  cfg.validate();
  corpus::IngestedDocument out;
  out.document = parser.parse(doc_id, pdf);
  for (auto& page : out.document.pages) page.image = normalize_page_image(page.image, cfg);
  for (auto& asset : out.document.assets) {
    asset.image = normalize_page_image(asset.image, cfg);
    if (cfg.summarize_assets && summarizer != nullptr) asset.summary = summarize_asset(asset, *summarizer, tokenizer);
  }
  out.chunks = chunk_document(out.document, cfg, tokenizer);
  return out;
}

}  // namespace mmrag::ingest
