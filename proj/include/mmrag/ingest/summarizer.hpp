#pragma once

#include <string_view>

#include "mmrag/corpus/tokenizer.hpp"
#include "mmrag/corpus/types.hpp"
#include "mmrag/gen/generator.hpp"

namespace mmrag::ingest {

/// Instruction sent with every table/figure image when building summaries.
extern const std::string_view kAssetSummaryPrompt;

/// Generates the retrieval summary of one visual asset. The response is cut at
/// `corpus::kSummaryTokenCap` tokens; a response of '' (no relevant data) yields an empty
/// summary. Generation failures are rethrown as Error naming the asset id.
corpus::Summary summarize_asset(const corpus::VisualAsset& asset, const gen::Generator& generator,
                                const corpus::Tokenizer& tokenizer = corpus::default_tokenizer());

}  // namespace mmrag::ingest
