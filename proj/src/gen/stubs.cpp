#include "mmrag/gen/stubs.hpp"

#include <fmt/format.h>

#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

namespace mmrag::gen {

std::string canonical_answer(corpus::Letter l) { return fmt::format(R"({{"query_answer": "{}"}})", to_char(l)); }

GenerationRecord StubGenerator::complete(const augment::PromptPayload& payload) const {
  GenerationRecord rec;
  rec.raw_text = respond(payload);
  rec.prompt_tokens = usage_.prompt_tokens ? *usage_.prompt_tokens : corpus::default_tokenizer().count(payload.text);
  rec.completion_tokens = usage_.completion_tokens;
  rec.latency_s = usage_.latency_s;
  return rec;
}

OracleGenerator::OracleGenerator(const std::vector<corpus::BenchmarkItem>& items, StubUsage usage,
                                 std::string model_id)
    : StubGenerator(std::move(model_id), usage) {
  for (const auto& item : items) {
    gold_text_[item.question] = item.options.at(corpus::index_of(item.gold_letter()));
  }
}

std::string OracleGenerator::respond(const augment::PromptPayload& payload) const {
  const auto it = gold_text_.find(payload.question);
  if (it == gold_text_.end()) return "I do not know this question.";
  for (std::size_t i = 0; i < payload.displayed_options.size(); ++i) {
    if (payload.displayed_options[i] == it->second) return canonical_answer(corpus::letter_at(i));
  }
  return "gold option not displayed";
}

RandomGuessGenerator::RandomGuessGenerator(std::uint64_t seed, StubUsage usage, std::string model_id)
    : StubGenerator(std::move(model_id), usage), rng_(seed) {}

std::string RandomGuessGenerator::respond(const augment::PromptPayload&) const {
  std::lock_guard lock(mu_);
  return canonical_answer(corpus::letter_at(static_cast<std::size_t>(rng_() % corpus::kOptionCount)));
}

MemorizedPositionGenerator::MemorizedPositionGenerator(const std::vector<corpus::BenchmarkItem>& items,
                                                       StubUsage usage, std::string model_id)
    : StubGenerator(std::move(model_id), usage) {
  for (const auto& item : items) original_gold_[item.question] = item.gold_letter();
}

std::string MemorizedPositionGenerator::respond(const augment::PromptPayload& payload) const {
  const auto it = original_gold_.find(payload.question);
  return canonical_answer(it == original_gold_.end() ? corpus::Letter::A : it->second);
}

FixedTextGenerator::FixedTextGenerator(std::string text, StubUsage usage, std::string model_id)
    : StubGenerator(std::move(model_id), usage), text_(std::move(text)) {}

std::string FixedTextGenerator::respond(const augment::PromptPayload&) const { return text_; }

DigestSummaryGenerator::DigestSummaryGenerator(StubUsage usage, std::string model_id)
    : StubGenerator(std::move(model_id), usage) {}

std::string DigestSummaryGenerator::respond(const augment::PromptPayload& payload) const {
  if (payload.images.empty()) return "''";
  const auto& img = payload.images.front();
  return fmt::format("Visual content of {}x{} pixels, digest {}.", img.width_px, img.height_px,
                     sha256_hex(img.bytes).substr(0, 12));
}

}  // namespace mmrag::gen
