#include "mmrag/eval/results.hpp"

#include <algorithm>

#include "mmrag/errors.hpp"

namespace mmrag::eval {

namespace {

std::string order_string(const corpus::OptionOrder& o) {
  std::string s;
  for (auto slot : o.slots()) s += to_char(corpus::letter_at(slot));
  return s;
}

corpus::OptionOrder parse_order(const std::string& s) {
  if (s.size() != corpus::kOptionCount) throw SchemaError("option order must have four letters");
  std::array<std::uint8_t, corpus::kOptionCount> slots{};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto l = corpus::parse_letter(std::string_view(&s[i], 1));
    if (!l) throw SchemaError("option order must use the letters A-D");
    slots[i] = static_cast<std::uint8_t>(corpus::index_of(*l));
  }
  return corpus::OptionOrder(slots);
}

corpus::Letter letter_field(const nlohmann::json& j, const char* key) {
  const auto l = corpus::parse_letter(j.at(key).get<std::string>());
  if (!l) throw SchemaError(std::string("field '") + key + "' is not a letter A-D");
  return *l;
}

}  // namespace

void to_json(nlohmann::json& j, const ItemResult& r) {
  nlohmann::json rec{{"prompt_tokens", r.record.prompt_tokens},
                     {"completion_tokens", r.record.completion_tokens},
                     {"latency_s", r.record.latency_s},
                     {"raw_text", r.record.raw_text},
                     {"estimated_tokens", r.record.estimated_tokens},
                     {"retries", r.record.retries}};
  if (r.record.ttft_ms) rec["ttft_ms"] = *r.record.ttft_ms;
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : r.retrieval_trace) trace.push_back({{"key", t.key}, {"score", t.score}, {"page", t.page_key}});
  j = nlohmann::json{{"item_id", r.item_id},
                     {"run_index", r.run_index},
                     {"difficulty", corpus::to_string(r.difficulty)},
                     {"chosen", r.chosen ? nlohmann::json(std::string(1, to_char(*r.chosen))) : nlohmann::json()},
                     {"gold", std::string(1, to_char(r.gold))},
                     {"correct", r.correct},
                     {"order", order_string(r.order)},
                     {"record", std::move(rec)},
                     {"trace", std::move(trace)},
                     {"truncated", r.prompt_truncated}};
  if (r.precision_at_k) j["precision_at_k"] = *r.precision_at_k;
  if (r.error) j["error"] = *r.error;
}

void from_json(const nlohmann::json& j, ItemResult& r) {
  r.item_id = j.at("item_id").get<std::string>();
  r.run_index = j.at("run_index").get<int>();
  const auto d = corpus::parse_difficulty(j.at("difficulty").get<std::string>());
  if (!d) throw SchemaError("unknown difficulty");
  r.difficulty = *d;
  r.chosen = j.at("chosen").is_null() ? std::nullopt : std::optional(letter_field(j, "chosen"));
  r.gold = letter_field(j, "gold");
  r.correct = j.at("correct").get<bool>();
  r.order = parse_order(j.at("order").get<std::string>());
  const auto& rec = j.at("record");
  r.record.prompt_tokens = rec.at("prompt_tokens").get<std::size_t>();
  r.record.completion_tokens = rec.at("completion_tokens").get<std::size_t>();
  r.record.latency_s = rec.at("latency_s").get<double>();
  r.record.raw_text = rec.at("raw_text").get<std::string>();
  r.record.estimated_tokens = rec.value("estimated_tokens", false);
  r.record.retries = rec.value("retries", 0);
  r.record.ttft_ms = rec.contains("ttft_ms") ? std::optional(rec.at("ttft_ms").get<double>()) : std::nullopt;
  r.retrieval_trace.clear();
  for (const auto& t : j.at("trace")) {
    r.retrieval_trace.push_back({t.at("key").get<std::string>(), t.at("score").get<double>(),
                                 t.at("page").get<std::string>()});
  }
  r.precision_at_k = j.contains("precision_at_k") ? std::optional(j.at("precision_at_k").get<double>()) : std::nullopt;
  r.error = j.contains("error") ? std::optional(j.at("error").get<std::string>()) : std::nullopt;
  r.prompt_truncated = j.value("truncated", false);
  if (r.correct != (r.chosen == r.gold)) throw SchemaError("'correct' disagrees with chosen and gold letters");
}

void sort_results(std::vector<ItemResult>& results) {
  std::sort(results.begin(), results.end(), [](const ItemResult& a, const ItemResult& b) {
    return a.item_id != b.item_id ? a.item_id < b.item_id : a.run_index < b.run_index;
  });
}

}  // namespace mmrag::eval
