#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "mmrag/augment/context.hpp"
#include "mmrag/augment/payload.hpp"
#include "mmrag/corpus/tokenizer.hpp"

namespace mmrag::augment {

/// Evaluation instruction with `{question}` and `{question_string}` placeholders; the
/// context section follows the trailing "Context:" line.
extern const std::string_view kEvaluationTemplate;

struct PromptLimits {
  /// Ceiling on the estimated tokens of question, options, snippets and summaries.
  std::size_t context_ceiling = corpus::kDefaultTokenBudget;
  std::size_t max_images = 8;
};

/// "A: <opt> B: <opt> C: <opt> D: <opt>" in display order.
std::string question_string(const std::vector<std::string>& displayed_options);

/// Instantiates the evaluation template for `item` with options shown in `order` and the
/// bundle's evidence (snippets, then summaries, each in trace order) as context. When the
/// estimate exceeds the ceiling, the lowest-scored evidence is dropped first and
/// `truncated` is set; if the bare question is still over, throws PreconditionError.
/// Images beyond `max_images` are dropped from the tail.
PromptPayload assemble_prompt(const corpus::BenchmarkItem& item, const ContextBundle& bundle,
                              const corpus::OptionOrder& order, const PromptLimits& limits = {},
                              const corpus::Tokenizer& tokenizer = corpus::default_tokenizer());

}  // namespace mmrag::augment
