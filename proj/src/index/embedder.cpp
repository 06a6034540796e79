#include "mmrag/index/embedder.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "../http_util.hpp"
#include "mmrag/corpus/tokenizer.hpp"
#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

namespace mmrag::index {

namespace {

void require_text(std::string_view text) {
  if (trim(text).empty()) throw PreconditionError("text must be non-empty after trimming");
}

void require_normalized(const corpus::PageImage& image, int cap) {
  if (image.long_side() > cap) {
    throw PreconditionError(fmt::format("page image {}x{} exceeds the {} px cap; normalize it first",
                                        image.width_px, image.height_px, cap));
  }
}

/// Lowercased word tokens (punctuation dropped).
std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& span : corpus::default_tokenizer().spans(text)) {
    const auto tok = text.substr(span.begin, span.end - span.begin);
    const auto c = static_cast<unsigned char>(tok.front());
    if (std::isalnum(c) != 0 || c == '_' || c >= 0x80) out.push_back(to_lower(tok));
  }
  return out;
}

}  // namespace

HashEmbedder::HashEmbedder(HashEmbedderOptions options) : options_(options) {
  if (options_.dense_dim == 0 || options_.multivector_dim == 0 || options_.page_tokens == 0) {
    throw ConfigError("hash embedder dims and page token count must be >= 1");
  }
}

std::vector<float> HashEmbedder::seeded_vector(std::uint64_t seed, std::size_t dim) {
  std::mt19937_64 rng(seed);
  std::vector<float> v(dim);
  for (auto& x : v) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x = static_cast<float>(2.0 * u - 1.0);
  }
  return v;
}

DenseVector HashEmbedder::embed_text(std::string_view text) const {
  require_text(text);
  std::vector<double> acc(options_.dense_dim, 0.0);
  auto ws = words(text);
  if (ws.empty()) ws.emplace_back(trim(text));
  for (const auto& w : ws) {
    const auto v = seeded_vector(fnv1a64(w, fnv1a64("dense") ^ options_.seed), options_.dense_dim);
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
  }
  double norm = 0.0;
  for (double x : acc) norm += x * x;
  norm = std::sqrt(norm);
  std::vector<float> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(norm > 0 ? acc[i] / norm : 0.0);
  return DenseVector(std::move(out));
}

MultiVector HashEmbedder::embed_page(const corpus::PageImage& image, RetrieverId retriever) const {
  require_normalized(image, options_.max_image_side);
  const auto base = fnv1a64(image.bytes, fnv1a64(to_string(retriever)) ^ options_.seed);
  std::vector<float> flat;
  flat.reserve(options_.page_tokens * options_.multivector_dim);
  for (std::size_t t = 0; t < options_.page_tokens; ++t) {
    const auto v = seeded_vector(base + t, options_.multivector_dim);
    flat.insert(flat.end(), v.begin(), v.end());
  }
  return MultiVector(options_.multivector_dim, std::move(flat));
}

MultiVector HashEmbedder::embed_query(std::string_view text, RetrieverId retriever) const {
  require_text(text);
  auto ws = words(text);
  if (ws.empty()) ws.emplace_back(trim(text));
  std::vector<float> flat;
  flat.reserve(ws.size() * options_.multivector_dim);
  for (const auto& w : ws) {
    const auto v = seeded_vector(fnv1a64(w, fnv1a64(to_string(retriever)) ^ options_.seed),
                                 options_.multivector_dim);
    flat.insert(flat.end(), v.begin(), v.end());
  }
  return MultiVector(options_.multivector_dim, std::move(flat));
}

std::string_view to_string(EmbedKind k) noexcept {
  switch (k) {
    case EmbedKind::TextDense: return "text_dense";
    case EmbedKind::PageMultiVector: return "page_multivector";
    case EmbedKind::QueryMultiVector: return "query_multivector";
  }
  return "text_dense";
}

std::vector<std::string> validate_embed_response(const nlohmann::json& r, EmbedKind kind) {
  std::vector<std::string> v;
  if (!r.is_object()) return {"response is not an object"};
  if (!r.contains("dim") || !r["dim"].is_number_integer() || r["dim"].get<long long>() < 1) {
    v.emplace_back("dim must be a positive integer");
  }
  if (!r.contains("model_tag") || !r["model_tag"].is_string()) v.emplace_back("model_tag must be a string");
  if (!r.contains("vectors") || !r["vectors"].is_array() || r["vectors"].empty()) {
    v.emplace_back("vectors must be a non-empty array");
    return v;
  }
  const auto& vectors = r["vectors"];
  if (kind == EmbedKind::TextDense && vectors.size() != 1) {
    v.push_back(fmt::format("text_dense must return exactly one vector (got {})", vectors.size()));
  }
  const long long dim = r.contains("dim") && r["dim"].is_number_integer() ? r["dim"].get<long long>() : -1;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& row = vectors[i];
    if (!row.is_array()) {
      v.push_back(fmt::format("vectors[{}] is not an array", i));
      continue;
    }
    if (static_cast<long long>(row.size()) != dim) {
      v.push_back(fmt::format("vectors[{}] has length {} but dim is {}", i, row.size(), dim));
    }
    for (const auto& x : row) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        v.push_back(fmt::format("vectors[{}] holds a non-finite or non-numeric value", i));
        break;
      }
    }
  }
  return v;
}

struct EmbedServiceClient::Http {
  detail::UrlParts url;
  std::unique_ptr<httplib::Client> client;
};

EmbedServiceClient::EmbedServiceClient(EmbedServiceEndpoint endpoint)
    : endpoint_(std::move(endpoint)), http_(std::make_unique<Http>()) {
  http_->url = detail::split_url(endpoint_.base_url);
  http_->client = detail::make_client(http_->url, endpoint_.timeout_s);
  if (!endpoint_.api_key.empty()) http_->client->set_bearer_token_auth(endpoint_.api_key);
}

EmbedServiceClient::~EmbedServiceClient() = default;

nlohmann::json EmbedServiceClient::call(const nlohmann::json& request, EmbedKind kind) const {
  const auto path = http_->url.prefix + "/embed";
  auto res = http_->client->Post(path, request.dump(), "application/json");
  detail::check_result(res, fmt::format("embed ({})", to_string(kind)), endpoint_.base_url + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    throw ProtocolError(fmt::format("embedding response is not JSON: {}", detail::excerpt(res->body)));
  }
  if (j.is_object() && j.contains("vectors") && j["vectors"].is_array() && j["vectors"].empty()) {
    throw ProtocolError("embedding service returned an empty token list");
  }
  const auto violations = validate_embed_response(j, kind);
  if (!violations.empty()) throw ProtocolError("embedding response violates contract: " + violations.front());
  return j;
}

DenseVector EmbedServiceClient::embed_text(std::string_view text) const {
  require_text(text);
  const auto j = call({{"kind", "text_dense"}, {"text", text}}, EmbedKind::TextDense);
  DenseVector v(j["vectors"][0].get<std::vector<float>>());
  if (v.dim() != endpoint_.dense_dim) {
    throw ConfigError(fmt::format("embedding service returned dim {} but collections expect {}", v.dim(),
                                  endpoint_.dense_dim));
  }
  return v;
}

MultiVector EmbedServiceClient::embed_page(const corpus::PageImage& image, RetrieverId retriever) const {
  require_normalized(image, endpoint_.max_image_side);
  const auto j = call({{"kind", "page_multivector"},
                       {"retriever", to_string(retriever)},
                       {"image_b64", base64_encode(image.bytes)}},
                      EmbedKind::PageMultiVector);
  auto mv = MultiVector::from_rows(j["vectors"].get<std::vector<std::vector<float>>>());
  if (mv.dim() != endpoint_.multivector_dim) {
    throw ConfigError(fmt::format("embedding service returned dim {} for {} but collections expect {}", mv.dim(),
                                  to_string(retriever), endpoint_.multivector_dim));
  }
  return mv;
}

MultiVector EmbedServiceClient::embed_query(std::string_view text, RetrieverId retriever) const {
  require_text(text);
  const auto j = call({{"kind", "query_multivector"}, {"retriever", to_string(retriever)}, {"text", text}},
                      EmbedKind::QueryMultiVector);
  auto mv = MultiVector::from_rows(j["vectors"].get<std::vector<std::vector<float>>>());
  if (mv.dim() != endpoint_.multivector_dim) {
    throw ConfigError(fmt::format("embedding service returned dim {} for {} but collections expect {}", mv.dim(),
                                  to_string(retriever), endpoint_.multivector_dim));
  }
  return mv;
}

EmbedServiceHealth EmbedServiceClient::health() const {
  const auto path = http_->url.prefix + "/health";
  auto res = http_->client->Get(path);
  detail::check_result(res, "embedding health", endpoint_.base_url + path);
  try {
    const auto j = nlohmann::json::parse(res->body);
    return {j.at("status").get<std::string>(), j.value("models", std::vector<std::string>{})};
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(fmt::format("health response malformed: {}", e.what()));
  }
}

}  // namespace mmrag::index
