#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "mmrag/augment/payload.hpp"
#include "mmrag/corpus/tokenizer.hpp"

namespace mmrag::gen {

inline constexpr int kMaxRetries = 5;

struct GeneratorConfig {
  std::string endpoint;  // base URL, requests go to {endpoint}/chat/completions
  std::string model_id;
  std::string api_key;
  /// Absent means "do not send"; some model families reject the parameter.
  std::optional<double> temperature;
  std::optional<std::int64_t> seed;
  std::size_t max_images = 8;
  double timeout_s = 120.0;
  int retries = 2;
  bool streaming = false;
  double retry_backoff_s = 0.5;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

struct GenerationRecord {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  double latency_s = 0.0;
  std::optional<double> ttft_ms;  // streaming only
  std::string raw_text;
  /// Token counts came from the local tokenizer because the endpoint reported no usage.
  bool estimated_tokens = false;
  /// Failed attempts before the one recorded here.
  int retries = 0;
};

/// A chat-completion backend. Implementations are shareable across threads.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual GenerationRecord complete(const augment::PromptPayload& payload) const = 0;
  virtual const std::string& model_id() const = 0;
};

/// OpenAI-style chat-completions client (proprietary APIs and vLLM-served models alike).
/// Images are sent as base64 data-URL content parts in payload order.
class ChatCompletionsClient final : public Generator {
 public:
  explicit ChatCompletionsClient(GeneratorConfig cfg,
                                 const corpus::Tokenizer& tokenizer = corpus::default_tokenizer());
  ~ChatCompletionsClient() override;

  GenerationRecord complete(const augment::PromptPayload& payload) const override;
  const std::string& model_id() const override { return cfg_.model_id; }
  const GeneratorConfig& config() const noexcept { return cfg_; }

 private:
  GenerationRecord attempt(const std::string& body, const augment::PromptPayload& payload) const;

  GeneratorConfig cfg_;
  const corpus::Tokenizer* tokenizer_;
  struct Http;
  std::unique_ptr<Http> http_;
};

/// Request body sent for `payload` (exposed for fixture capture and tests).
std::string build_request_body(const GeneratorConfig& cfg, const augment::PromptPayload& payload);

}  // namespace mmrag::gen
