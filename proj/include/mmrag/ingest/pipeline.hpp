#pragma once

#include <string_view>

#include "mmrag/corpus/corpus.hpp"
#include "mmrag/gen/generator.hpp"
#include "mmrag/ingest/config.hpp"
#include "mmrag/ingest/parser.hpp"

namespace mmrag::ingest {

/// Parse, normalize images, summarize assets (when enabled and a summarizer is given),
/// then chunk. Sequential within one document.
corpus::IngestedDocument ingest_document(const DocumentParser& parser, std::string_view doc_id,
                                         std::string_view pdf, const IngestionConfig& cfg,
                                         const gen::Generator* summarizer,
                                         const corpus::Tokenizer& tokenizer = corpus::default_tokenizer());

}  // namespace mmrag::ingest
