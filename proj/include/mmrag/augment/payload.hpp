#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mmrag/corpus/types.hpp"

namespace mmrag::augment {

/// What is sent to a generator: instantiated prompt text plus ordered image parts.
struct PromptPayload {
  std::string text;
  std::vector<corpus::PageImage> images;
  corpus::OptionOrder order;

  // Structured view of the question as displayed, for bookkeeping and test stubs.
  std::string question;
  std::vector<std::string> displayed_options;

  std::size_t estimated_tokens = 0;
  bool truncated = false;
  std::size_t dropped_evidence = 0;
  std::size_t dropped_images = 0;
};

}  // namespace mmrag::augment
