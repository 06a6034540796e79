#pragma once

#include <cstddef>
#include <string>

#include "mmrag/corpus/types.hpp"

namespace mmrag::ingest {

struct IngestionConfig {
  std::size_t token_budget = corpus::kDefaultTokenBudget;
  int image_long_side_px = 1300;
  bool summarize_assets = true;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

struct ParserEndpoint {
  std::string base_url;
  std::string api_key;
  double timeout_s = 600.0;

  void validate() const;
};

}  // namespace mmrag::ingest
