#include "mmrag/gen/generator.hpp"

#include <chrono>
#include <thread>

#include <fmt/format.h>

#include "../http_util.hpp"
#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

namespace mmrag::gen {

using Clock = std::chrono::steady_clock;

void GeneratorConfig::validate() const {
  if (model_id.empty()) throw ConfigError("generator model_id is empty");
  if (temperature && *temperature < 0.0) throw ConfigError("generator temperature must be >= 0");
  if (retries < 0 || retries > kMaxRetries) {
    throw ConfigError(fmt::format("generator retries must be in [0, {}]", kMaxRetries));
  }
  if (!(timeout_s > 0.0)) throw ConfigError("generator timeout_s must be > 0");
  if (max_images < 1) throw ConfigError("generator max_images must be >= 1");
}

std::string build_request_body(const GeneratorConfig& cfg, const augment::PromptPayload& payload) {
  auto content = nlohmann::json::array();
  content.push_back({{"type", "text"}, {"text", payload.text}});
  for (const auto& img : payload.images) {
    content.push_back(
        {{"type", "image_url"},
         {"image_url", {{"url", fmt::format("data:{};base64,{}", corpus::mime_type(img.encoding),
                                            base64_encode(img.bytes))}}}});
  }
  nlohmann::json body{{"model", cfg.model_id},
                      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::move(content)}}})}};
  if (cfg.temperature) body["temperature"] = *cfg.temperature;
  if (cfg.seed) body["seed"] = *cfg.seed;
  if (cfg.streaming) {
    body["stream"] = true;
    body["stream_options"] = {{"include_usage", true}};
  }
  return body.dump();
}

struct ChatCompletionsClient::Http {
  detail::UrlParts url;
  std::string path;
};

ChatCompletionsClient::ChatCompletionsClient(GeneratorConfig cfg, const corpus::Tokenizer& tokenizer)
    : cfg_(std::move(cfg)), tokenizer_(&tokenizer), http_(std::make_unique<Http>()) {
  cfg_.validate();
  http_->url = detail::split_url(cfg_.endpoint);
  http_->path = http_->url.prefix + "/chat/completions";
}

ChatCompletionsClient::~ChatCompletionsClient() = default;

namespace {

bool retryable(const TransportError& e) {
  const int s = e.status();
  return s == 0 || s == 408 || s == 429 || s >= 500;
}

std::string content_text(const nlohmann::json& content) {
  if (content.is_string()) return content.get<std::string>();
  if (content.is_array()) {
    std::string out;
    for (const auto& part : content) {
      if (part.is_object() && part.value("type", "") == "text") out += part.value("text", "");
    }
    return out;
  }
  return {};
}

struct Usage {
  std::size_t prompt = 0;
  std::size_t completion = 0;
};

std::optional<Usage> read_usage(const nlohmann::json& j) {
  if (!j.contains("usage") || !j["usage"].is_object()) return std::nullopt;
  const auto& u = j["usage"];
  if (!u.contains("prompt_tokens") || !u.contains("completion_tokens")) return std::nullopt;
  const auto p = u["prompt_tokens"].get<long long>();
  const auto c = u["completion_tokens"].get<long long>();
  if (p < 0 || c < 0) throw ProtocolError("endpoint reported negative token usage");
  return Usage{static_cast<std::size_t>(p), static_cast<std::size_t>(c)};
}

}  // namespace

GenerationRecord ChatCompletionsClient::attempt(const std::string& body,
                                                const augment::PromptPayload& payload) const {
  auto client = detail::make_client(http_->url, cfg_.timeout_s);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
  const std::string url = cfg_.endpoint + "/chat/completions";

  GenerationRecord rec;
  std::optional<Usage> usage;
  const auto start = Clock::now();

  if (!cfg_.streaming) {
    auto res = client->Post(http_->path, headers, body, "application/json");
    detail::check_result(res, "chat completion", url);
    rec.latency_s = std::chrono::duration<double>(Clock::now() - start).count();
    try {
      const auto j = nlohmann::json::parse(res->body);
      rec.raw_text = content_text(j.at("choices").at(0).at("message").at("content"));
      usage = read_usage(j);
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(fmt::format("chat completion response malformed ({}): {}", e.what(),
                                      detail::excerpt(res->body)));
    }
  } else {
    std::string buffer;   // unparsed SSE bytes
    std::string raw_all;  // for error excerpts
    std::optional<Clock::time_point> first_token;
    bool done = false;
    std::optional<std::string> protocol_error;

    httplib::Request req;
    req.method = "POST";
    req.path = http_->path;
    req.headers = headers;
    req.body = body;
    req.set_header("Content-Type", "application/json");
    req.set_header("Accept", "text/event-stream");
    req.content_receiver = [&](const char* data, std::size_t len, std::uint64_t, std::uint64_t) {
      raw_all.append(data, len);
      buffer.append(data, len);
      std::size_t pos;
      while ((pos = buffer.find('\n')) != std::string::npos) {
        std::string line = buffer.substr(0, pos);
        buffer.erase(0, pos + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("data:", 0) != 0) continue;
        const auto data_part = std::string(trim(std::string_view(line).substr(5)));
        if (data_part == "[DONE]") {
          done = true;
          continue;
        }
        try {
          const auto j = nlohmann::json::parse(data_part);
          if (auto u = read_usage(j)) usage = u;
          if (j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
            const auto& delta = j["choices"][0].value("delta", nlohmann::json::object());
            if (delta.contains("content")) {
              const auto piece = content_text(delta["content"]);
              if (!piece.empty() && !first_token) first_token = Clock::now();
              rec.raw_text += piece;
            }
          }
        } catch (const std::exception& e) {
          protocol_error = e.what();
          return false;
        }
      }
      return true;
    };
    auto res = client->send(req);
    if (res && (res->status < 200 || res->status >= 300) && res->body.empty()) res->body = raw_all;
    if (protocol_error) throw ProtocolError("malformed stream event: " + *protocol_error);
    detail::check_result(res, "chat completion (stream)", url);
    rec.latency_s = std::chrono::duration<double>(Clock::now() - start).count();
    if (first_token) {
      rec.ttft_ms = std::chrono::duration<double, std::milli>(*first_token - start).count();
    }
    (void)done;
  }

  if (usage) {
    rec.prompt_tokens = usage->prompt;
    rec.completion_tokens = usage->completion;
  } else {
    rec.prompt_tokens = tokenizer_->count(payload.text);
    rec.completion_tokens = tokenizer_->count(rec.raw_text);
    rec.estimated_tokens = true;
  }
  return rec;
}

GenerationRecord ChatCompletionsClient::complete(const augment::PromptPayload& payload) const {
  if (payload.images.size() > cfg_.max_images) {
    throw PreconditionError(fmt::format("payload carries {} images but {} allows at most {}", payload.images.size(),
                                        cfg_.model_id, cfg_.max_images));
  }
  const auto body = build_request_body(cfg_, payload);
  for (int attempt_no = 0;; ++attempt_no) {
    try {
      auto rec = attempt(body, payload);
      rec.retries = attempt_no;
      return rec;
    } catch (const AuthError&) {
      throw;
    } catch (const TransportError& e) {
      if (!retryable(e) || attempt_no >= cfg_.retries) throw;
      const auto backoff = cfg_.retry_backoff_s * static_cast<double>(1 << attempt_no);
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
    }
  }
}

}  // namespace mmrag::gen
