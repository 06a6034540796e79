#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mmrag/corpus/tokenizer.hpp"
#include "mmrag/corpus/types.hpp"
#include "mmrag/ingest/config.hpp"

namespace mmrag::ingest {

/// Splits `text` into the fewest consecutive pieces of at most `budget` tokens, cutting
/// at sentence boundaries where possible and between tokens otherwise. Concatenating
/// the pieces reproduces `text` exactly.
std::vector<std::string> split_to_budget(std::string_view text, std::size_t budget,
                                         const corpus::Tokenizer& tokenizer = corpus::default_tokenizer());

/// One chunk per parsed element in document order; elements above the token budget are
/// split with `split_to_budget`. Elements with blank text produce no chunk.
std::vector<corpus::Chunk> chunk_document(const corpus::SourceDocument& doc, const IngestionConfig& cfg,
                                          const corpus::Tokenizer& tokenizer = corpus::default_tokenizer());

}  // namespace mmrag::ingest
