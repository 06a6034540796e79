#include "mmrag/ingest/summarizer.hpp"

#include <fmt/format.h>

#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

namespace mmrag::ingest {

const std::string_view kAssetSummaryPrompt =
    "You are an AI assistant specialized in summarizing tables and figures for efficient retrieval. "
    "\n\nInstructions:\n\n"
    "Identify Input Type: Explicitly state whether the input provided is a table or a figure.\n"
    "Scientific Abstract: Summarize the contents concisely in the style of a scientific abstract. "
    "Include relevant numeric values and key findings. \n"
    "Retrieval Optimization: Structure your summary clearly, optimizing keywords and phrasing to "
    "enhance retrieval and indexing.\n"
    "Length Constraint: Your summary must strictly adhere to a maximum of 300 words or 250 tokens. "
    "Do not exceed this limit under any circumstances. Any text exceeding will be just cutoff post "
    "generation.\n"
    "Avoid Generic Openings: Do not start your summary with generic phrases such as \"The image "
    "provided is,\" \"The table shows,\" or similar introductory sentences. Instead, immediately "
    "describe the core content.\n"
    "Prevent Redundancy: Write succinctly, avoiding repetition of concepts or data points.\n"
    "Final output: Only summary text. If no relevant data is present, output ''.";

namespace {

bool is_empty_marker(std::string_view s) { return s.empty() || s == "''" || s == "\"\"" || s == "\\'\\'"; }

}  // namespace

corpus::Summary summarize_asset(const corpus::VisualAsset& asset, const gen::Generator& generator,
                                const corpus::Tokenizer& tokenizer) {
  augment::PromptPayload payload;
  payload.text = std::string(kAssetSummaryPrompt);
  payload.images.push_back(asset.image);
  payload.estimated_tokens = tokenizer.count(payload.text);

  gen::GenerationRecord rec;
  try {
    rec = generator.complete(payload);
  } catch (const std::exception& e) {
    throw Error(fmt::format("summarizing asset '{}' failed: {}", asset.id, e.what()));
  }
  const auto text = trim(rec.raw_text);
  if (is_empty_marker(text)) return {};
  const auto kept = tokenizer.truncate(text, corpus::kSummaryTokenCap);
  return {std::string(kept), tokenizer.count(kept)};
}

}  // namespace mmrag::ingest
