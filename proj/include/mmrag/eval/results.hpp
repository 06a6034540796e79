#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmrag/augment/context.hpp"
#include "mmrag/corpus/types.hpp"
#include "mmrag/gen/generator.hpp"

namespace mmrag::eval {

/// Outcome of one (item, run) request. `chosen` absent means ParseFailure; `error` then
/// says whether the generator failed outright.
struct ItemResult {
  std::string item_id;
  int run_index = 0;
  corpus::Difficulty difficulty = corpus::Difficulty::Easy;
  std::optional<corpus::Letter> chosen;
  /// Gold letter as displayed under `order`.
  corpus::Letter gold = corpus::Letter::A;
  bool correct = false;
  corpus::OptionOrder order;
  gen::GenerationRecord record;
  std::vector<augment::TraceEntry> retrieval_trace;
  /// Absent when the strategy retrieves nothing.
  std::optional<double> precision_at_k;
  std::optional<std::string> error;
  bool prompt_truncated = false;

  bool parse_failure() const noexcept { return !chosen.has_value(); }
};

void to_json(nlohmann::json& j, const ItemResult& r);
void from_json(const nlohmann::json& j, ItemResult& r);

/// Orders by (item_id, run_index), the canonical order for every reduction.
void sort_results(std::vector<ItemResult>& results);

}  // namespace mmrag::eval
