#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmrag/augment/context.hpp"
#include "mmrag/corpus/corpus.hpp"
#include "mmrag/eval/results.hpp"

namespace mmrag::eval {

struct Count {
  std::size_t x = 0;
  std::size_t n = 0;
  friend bool operator==(const Count&, const Count&) = default;
};

/// Correct answers over all results, or over one difficulty stratum. Parse failures count
/// as incorrect.
Count accuracy(const std::vector<ItemResult>& results, std::optional<corpus::Difficulty> stratum = std::nullopt);

std::size_t parse_failures(const std::vector<ItemResult>& results,
                           std::optional<corpus::Difficulty> stratum = std::nullopt);

/// |top-k trace page keys ∩ gold| / k; the denominator stays k when fewer hits came back.
/// Several hits on the same page count once.
double precision_at_k(const std::vector<augment::TraceEntry>& trace, const std::set<std::string>& gold_pages,
                      std::size_t k = 5);

/// Relevant page keys for `item`: its annotated gold pages, else every page of its source
/// document. Without annotations, empty when the document is not in the corpus.
std::set<std::string> gold_page_keys(const corpus::BenchmarkItem& item, const corpus::Corpus& corpus);

struct ModelPrice {
  double input_per_1m = 0.0;   // USD per 1M prompt tokens
  double output_per_1m = 0.0;  // USD per 1M completion tokens
};

using PriceTable = std::map<std::string, ModelPrice>;

void to_json(nlohmann::json& j, const ModelPrice& p);
void from_json(const nlohmann::json& j, ModelPrice& p);
/// Throws ConfigError on a negative or non-finite price.
void validate_prices(const PriceTable& prices);

/// USD cost of one request.
double request_cost(std::size_t prompt_tokens, std::size_t completion_tokens, const ModelPrice& price);

/// Σ (prompt·in + completion·out) / 1e6. Token totals are summed first so that integral
/// usage gives an exactly rounded result. Throws ConfigError when `model_id` has no price.
double cost_of_results(const std::vector<ItemResult>& results, const PriceTable& prices, const std::string& model_id);

/// US cents per correct answer; absent when nothing was answered correctly.
std::optional<double> price_per_correct(double cost_usd, std::size_t n_correct);

/// Tokens per second. Throws PreconditionError unless elapsed_s > 0.
double throughput(double total_tokens, double elapsed_s);

}  // namespace mmrag::eval
