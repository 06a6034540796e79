#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mmrag/corpus/types.hpp"
#include "mmrag/gen/generator.hpp"

namespace mmrag::gen {

/// Offline generators used by tests, the acceptance suite and `evaluate` with a stub model.
/// All answer with the canonical '{"query_answer": "X"}' form and report usage as if the
/// endpoint returned it.

struct StubUsage {
  /// Absent: count the prompt with the default tokenizer.
  std::optional<std::size_t> prompt_tokens;
  std::size_t completion_tokens = 7;
  double latency_s = 0.0;
};

/// Serialized answer in the form the evaluation template asks for.
std::string canonical_answer(corpus::Letter l);

class StubGenerator : public Generator {
 public:
  StubGenerator(std::string model_id, StubUsage usage) : model_id_(std::move(model_id)), usage_(usage) {}
  GenerationRecord complete(const augment::PromptPayload& payload) const final;
  const std::string& model_id() const final { return model_id_; }

 protected:
  virtual std::string respond(const augment::PromptPayload& payload) const = 0;

 private:
  std::string model_id_;
  StubUsage usage_;
};

/// Always picks the option whose text is the item's gold option.
class OracleGenerator final : public StubGenerator {
 public:
  OracleGenerator(const std::vector<corpus::BenchmarkItem>& items, StubUsage usage = {},
                  std::string model_id = "stub-oracle");

 protected:
  std::string respond(const augment::PromptPayload& payload) const override;

 private:
  std::map<std::string, std::string> gold_text_;  // question -> gold option text
};

/// Uniform random letter per call from a seeded engine.
class RandomGuessGenerator final : public StubGenerator {
 public:
  explicit RandomGuessGenerator(std::uint64_t seed, StubUsage usage = {}, std::string model_id = "stub-random");

 protected:
  std::string respond(const augment::PromptPayload& payload) const override;

 private:
  mutable std::mutex mu_;
  mutable std::mt19937_64 rng_;
};

/// Answers the letter at which the gold option sits in the unpermuted item, whatever
/// is displayed; the behaviour of a model that memorized answer positions.
class MemorizedPositionGenerator final : public StubGenerator {
 public:
  MemorizedPositionGenerator(const std::vector<corpus::BenchmarkItem>& items, StubUsage usage = {},
                             std::string model_id = "stub-memorized");

 protected:
  std::string respond(const augment::PromptPayload& payload) const override;

 private:
  std::map<std::string, corpus::Letter> original_gold_;
};

/// Returns a fixed text (use for canned answers or asset summaries).
class FixedTextGenerator final : public StubGenerator {
 public:
  FixedTextGenerator(std::string text, StubUsage usage = {}, std::string model_id = "stub-fixed");

 protected:
  std::string respond(const augment::PromptPayload& payload) const override;

 private:
  std::string text_;
};

/// Describes the first attached image by size and content digest; deterministic summaries
/// for offline index builds.
class DigestSummaryGenerator final : public StubGenerator {
 public:
  explicit DigestSummaryGenerator(StubUsage usage = {}, std::string model_id = "stub-summary");

 protected:
  std::string respond(const augment::PromptPayload& payload) const override;
};

/// Delegates to a callback; for tests.
class ScriptedGenerator final : public Generator {
 public:
  using Fn = std::function<GenerationRecord(const augment::PromptPayload&)>;
  ScriptedGenerator(Fn fn, std::string model_id = "stub-scripted")
      : fn_(std::move(fn)), model_id_(std::move(model_id)) {}
  GenerationRecord complete(const augment::PromptPayload& payload) const override { return fn_(payload); }
  const std::string& model_id() const override { return model_id_; }

 private:
  Fn fn_;
  std::string model_id_;
};

}  // namespace mmrag::gen
