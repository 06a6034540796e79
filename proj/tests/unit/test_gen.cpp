#include <atomic>
#include <chrono>
#include <thread>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "mmrag/errors.hpp"
#include "mmrag/gen/answer.hpp"
#include "mmrag/gen/generator.hpp"
#include "mmrag/gen/stubs.hpp"
#include "mmrag/ingest/image.hpp"
#include "mmrag/eval/runner.hpp"
#include "stub_server.hpp"

using namespace mmrag;
using corpus::Letter;
using gen::extract_answer;

namespace {

augment::PromptPayload payload(std::string text = "Which letter? A: x B: y C: z D: w") {
  augment::PromptPayload p;
  p.text = std::move(text);
  return p;
}

gen::GeneratorConfig config(const std::string& url) {
  gen::GeneratorConfig cfg;
  cfg.endpoint = url + "/v1";
  cfg.model_id = "test-model";
  cfg.api_key = "sk-test-key";
  cfg.retry_backoff_s = 0.001;
  cfg.timeout_s = 5;
  return cfg;
}

std::string completion(const std::string& text, bool with_usage = true) {
  nlohmann::json j{{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}}};
  if (with_usage) j["usage"] = {{"prompt_tokens", 100}, {"completion_tokens", 20}};
  return j.dump();
}

}  // namespace

TEST(ExtractAnswer, Examples) {
  EXPECT_EQ(extract_answer(R"({"query_answer": "B"})"), Letter::B);
  EXPECT_EQ(extract_answer(R"(Sure! {"query_answer":"D"} hope that helps)"), Letter::D);
  EXPECT_EQ(extract_answer(R"({"query_answer": "E"})"), std::nullopt);
  EXPECT_EQ(extract_answer("  C \n"), Letter::C);
  EXPECT_EQ(extract_answer("query_answer: A"), Letter::A);
  EXPECT_EQ(extract_answer("The answer is C"), std::nullopt);
  EXPECT_EQ(extract_answer("c"), std::nullopt);
  EXPECT_EQ(extract_answer(""), std::nullopt);
  EXPECT_EQ(extract_answer(R"({"query_answer": "AB"})"), std::nullopt);
  // Strict parse wins over a later pattern match.
  EXPECT_EQ(extract_answer(R"({"query_answer": "A", "note": "query_answer: B"})"), Letter::A);
}

TEST(ExtractAnswer, CanonicalRoundTrip) {
  for (const auto l : {Letter::A, Letter::B, Letter::C, Letter::D}) EXPECT_EQ(extract_answer(gen::canonical_answer(l)), l);
}

TEST(ExtractAnswer, TotalOverArbitraryBytes) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    std::string s(rng() % 40, '\0');
    for (auto& c : s) c = static_cast<char>(rng() % 256);
    if (i % 3 == 0) s = "{\"query_answer\": " + s;
    EXPECT_NO_THROW(extract_answer(s));
  }
}

TEST(GeneratorConfig, Validation) {
  gen::GeneratorConfig cfg = config("http://x");
  EXPECT_NO_THROW(cfg.validate());
  cfg.retries = 6;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = config("http://x");
  cfg.temperature = -0.1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = config("http://x");
  cfg.timeout_s = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(RequestBody, ShapeAndOptionalFields) {
  auto cfg = config("http://x");
  auto p = payload();
  p.images = {ingest::solid_image(4, 4), ingest::solid_image(5, 5, corpus::ImageEncoding::Jpeg)};
  auto body = nlohmann::json::parse(gen::build_request_body(cfg, p));
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_FALSE(body.contains("temperature"));
  EXPECT_FALSE(body.contains("seed"));
  const auto& content = body["messages"][0]["content"];
  ASSERT_EQ(content.size(), 3u);
  EXPECT_EQ(content[0]["text"], p.text);
  EXPECT_EQ(content[1]["image_url"]["url"].get<std::string>().rfind("data:image/png;base64,", 0), 0u);
  EXPECT_EQ(content[2]["image_url"]["url"].get<std::string>().rfind("data:image/jpeg;base64,", 0), 0u);
  cfg.temperature = 0.0;
  cfg.seed = 42;
  body = nlohmann::json::parse(gen::build_request_body(cfg, p));
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["seed"], 42);
}

TEST(ChatClient, ReportedUsageIsRecorded) {
  testing_support::StubServer stub;
  std::string auth;
  stub.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    res.set_content(completion(R"({"query_answer": "C"})"), "application/json");
  });
  stub.start();
  const gen::ChatCompletionsClient client(config(stub.url()));
  const auto rec = client.complete(payload());
  EXPECT_EQ(rec.prompt_tokens, 100u);
  EXPECT_EQ(rec.completion_tokens, 20u);
  EXPECT_FALSE(rec.estimated_tokens);
  EXPECT_FALSE(rec.ttft_ms.has_value());
  EXPECT_GE(rec.latency_s, 0.0);
  EXPECT_EQ(rec.retries, 0);
  EXPECT_EQ(extract_answer(rec.raw_text), Letter::C);
  EXPECT_EQ(auth, "Bearer sk-test-key");
}

TEST(ChatClient, MissingUsageIsEstimated) {
  testing_support::StubServer stub;
  stub.server().Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion("B", false), "application/json");
  });
  stub.start();
  const gen::ChatCompletionsClient client(config(stub.url()));
  const auto p = payload();
  const auto rec = client.complete(p);
  EXPECT_TRUE(rec.estimated_tokens);
  EXPECT_EQ(rec.prompt_tokens, corpus::default_tokenizer().count(p.text));
  EXPECT_EQ(rec.completion_tokens, 1u);
}

TEST(ChatClient, RetriesThenSucceeds) {
  testing_support::StubServer stub;
  std::atomic<int> calls{0};
  stub.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (calls++ < 2) {
      res.status = 503;
      res.set_content("overloaded", "text/plain");
      return;
    }
    res.set_content(completion("A"), "application/json");
  });
  stub.start();
  auto cfg = config(stub.url());
  cfg.retries = 2;
  const auto rec = gen::ChatCompletionsClient(cfg).complete(payload());
  EXPECT_EQ(rec.retries, 2);
  EXPECT_EQ(calls.load(), 3);

  calls = 0;
  cfg.retries = 1;
  try {
    gen::ChatCompletionsClient(cfg).complete(payload());
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_EQ(e.status(), 503);
    EXPECT_NE(std::string(e.what()).find("overloaded"), std::string::npos);
  }
}

TEST(ChatClient, ClientErrorsAreNotRetried) {
  testing_support::StubServer stub;
  std::atomic<int> calls{0};
  stub.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 400;
    res.set_content(R"({"error":"bad temperature"})", "application/json");
  });
  stub.start();
  auto cfg = config(stub.url());
  cfg.retries = 3;
  EXPECT_THROW(gen::ChatCompletionsClient(cfg).complete(payload()), TransportError);
  EXPECT_EQ(calls.load(), 1);
}

TEST(ChatClient, UnauthorizedHidesKey) {
  testing_support::StubServer stub;
  stub.server().Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.status = 401;
    res.set_content(R"({"error":"invalid key"})", "application/json");
  });
  stub.start();
  try {
    gen::ChatCompletionsClient(config(stub.url())).complete(payload());
    FAIL();
  } catch (const AuthError& e) {
    EXPECT_EQ(std::string(e.what()).find("sk-test-key"), std::string::npos);
  }
}

TEST(ChatClient, MalformedBodyIsProtocolError) {
  testing_support::StubServer stub;
  stub.server().Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices": []})", "application/json");
  });
  stub.start();
  EXPECT_THROW(gen::ChatCompletionsClient(config(stub.url())).complete(payload()), ProtocolError);
}

TEST(ChatClient, TooManyImagesRejectedBeforeSending) {
  auto cfg = config("http://127.0.0.1:1");
  cfg.max_images = 1;
  auto p = payload();
  p.images = {ingest::solid_image(2, 2), ingest::solid_image(3, 3)};
  EXPECT_THROW(gen::ChatCompletionsClient(cfg).complete(p), PreconditionError);
}

TEST(ChatClient, StreamingMeasuresTimeToFirstToken) {
  testing_support::StubServer stub;
  stub.server().Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
    EXPECT_TRUE(nlohmann::json::parse(req.body).value("stream", false));
    res.set_chunked_content_provider("text/event-stream", [](std::size_t, httplib::DataSink& sink) {
      const auto event = [&sink](const nlohmann::json& j) {
        const auto s = "data: " + j.dump() + "\n\n";
        sink.write(s.data(), s.size());
      };
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      event({{"choices", {{{"delta", {{"content", "{\"query_answer\": "}}}}}}});
      std::this_thread::sleep_for(std::chrono::milliseconds(30));
      event({{"choices", {{{"delta", {{"content", "\"D\"}"}}}}}}});
      event({{"choices", nlohmann::json::array()}, {"usage", {{"prompt_tokens", 100}, {"completion_tokens", 20}}}});
      const std::string done = "data: [DONE]\n\n";
      sink.write(done.data(), done.size());
      sink.done();
      return true;
    });
  });
  stub.start();
  auto cfg = config(stub.url());
  cfg.streaming = true;
  const auto rec = gen::ChatCompletionsClient(cfg).complete(payload());
  ASSERT_TRUE(rec.ttft_ms.has_value());
  EXPECT_GE(*rec.ttft_ms, 45.0);
  EXPECT_LT(*rec.ttft_ms, 75.0);
  EXPECT_GE(rec.latency_s, *rec.ttft_ms / 1000.0);
  EXPECT_EQ(rec.raw_text, R"({"query_answer": "D"})");
  EXPECT_EQ(rec.prompt_tokens, 100u);
  EXPECT_EQ(rec.completion_tokens, 20u);
}

TEST(Stubs, OracleMemorizedRandom) {
  const auto items = testing_support::synthetic_benchmark(4, 3, 3, 1);
  const gen::OracleGenerator oracle_gen(items, {.prompt_tokens = 1000, .completion_tokens = 500});
  const gen::MemorizedPositionGenerator memorized(items);
  const corpus::OptionOrder rot({1, 2, 3, 0});
  for (const auto& it : items) {
    const auto permuted = eval::apply_order(it, rot);
    auto p = payload();
    p.question = it.question;
    p.displayed_options = permuted.item.options;
    p.order = rot;
    const auto rec = oracle_gen.complete(p);
    EXPECT_EQ(extract_answer(rec.raw_text), corpus::parse_letter(std::string(1, permuted.item.gold)));
    EXPECT_EQ(rec.prompt_tokens, 1000u);
    EXPECT_EQ(rec.completion_tokens, 500u);
    // Memorized answers the original position, which the rotation moved away from.
    EXPECT_EQ(extract_answer(memorized.complete(p).raw_text), corpus::parse_letter(std::string(1, it.gold)));
  }
  const gen::RandomGuessGenerator a(9), b(9);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(a.complete(payload()).raw_text, b.complete(payload()).raw_text);
}
