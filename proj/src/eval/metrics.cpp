#include "mmrag/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mmrag/errors.hpp"

namespace mmrag::eval {

Count accuracy(const std::vector<ItemResult>& results, std::optional<corpus::Difficulty> stratum) {
  Count c;
  for (const auto& r : results) {
    if (stratum && r.difficulty != *stratum) continue;
    ++c.n;
    if (r.correct) ++c.x;
  }
  return c;
}

std::size_t parse_failures(const std::vector<ItemResult>& results, std::optional<corpus::Difficulty> stratum) {
  return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [&](const ItemResult& r) {
    return (!stratum || r.difficulty == *stratum) && r.parse_failure();
  }));
}

double precision_at_k(const std::vector<augment::TraceEntry>& trace, const std::set<std::string>& gold_pages,
                      std::size_t k) {
  if (k < 1) throw PreconditionError("precision@k needs k >= 1");
  std::set<std::string> hit;
  for (std::size_t i = 0; i < trace.size() && i < k; ++i) {
    if (gold_pages.count(trace[i].page_key) > 0) hit.insert(trace[i].page_key);
  }
  return static_cast<double>(hit.size()) / static_cast<double>(k);
}

std::set<std::string> gold_page_keys(const corpus::BenchmarkItem& item, const corpus::Corpus& corpus) {
  std::set<std::string> keys;
  if (!item.gold_pages.empty()) {
    for (int p : item.gold_pages) keys.insert(corpus::page_key(item.source_doc, p));
    return keys;
  }
  if (const auto* doc = corpus.document(item.source_doc)) {
    for (const auto& page : doc->pages) keys.insert(corpus::page_key(doc->id, page.number));
  }
  return keys;
}

void to_json(nlohmann::json& j, const ModelPrice& p) {
  j = nlohmann::json{{"input_per_1m", p.input_per_1m}, {"output_per_1m", p.output_per_1m}};
}

void from_json(const nlohmann::json& j, ModelPrice& p) {
  p.input_per_1m = j.at("input_per_1m").get<double>();
  p.output_per_1m = j.at("output_per_1m").get<double>();
}

void validate_prices(const PriceTable& prices) {
  for (const auto& [model, p] : prices) {
    if (!(std::isfinite(p.input_per_1m) && p.input_per_1m >= 0.0 && std::isfinite(p.output_per_1m) &&
          p.output_per_1m >= 0.0)) {
      throw ConfigError(fmt::format("price for model '{}' must be non-negative", model));
    }
  }
}

double request_cost(std::size_t prompt_tokens, std::size_t completion_tokens, const ModelPrice& price) {
  return (static_cast<double>(prompt_tokens) * price.input_per_1m +
          static_cast<double>(completion_tokens) * price.output_per_1m) /
         1'000'000.0;
}

double cost_of_results(const std::vector<ItemResult>& results, const PriceTable& prices, const std::string& model_id) {
  const auto it = prices.find(model_id);
  if (it == prices.end()) throw ConfigError(fmt::format("no price configured for model '{}'", model_id));
  std::size_t in = 0;
  std::size_t out = 0;
  for (const auto& r : results) {
    in += r.record.prompt_tokens;
    out += r.record.completion_tokens;
  }
  return request_cost(in, out, it->second);
}

std::optional<double> price_per_correct(double cost_usd, std::size_t n_correct) {
  if (n_correct == 0) return std::nullopt;
  return 100.0 * cost_usd / static_cast<double>(n_correct);
}

double throughput(double total_tokens, double elapsed_s) {
  if (!(elapsed_s > 0.0)) throw PreconditionError("throughput needs elapsed_s > 0");
  return total_tokens / elapsed_s;
}

}  // namespace mmrag::eval
