#include "mmrag/index/qdrant_store.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "../http_util.hpp"
#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

namespace mmrag::index {

struct QdrantStore::Impl {
  RemoteStoreEndpoint endpoint;
  detail::UrlParts url;
  std::unique_ptr<httplib::Client> client;

  httplib::Headers headers() const {
    httplib::Headers h;
    if (!endpoint.api_key.empty()) h.emplace("api-key", endpoint.api_key);
    return h;
  }

  std::string path(std::string_view tail) const { return url.prefix + std::string(tail); }

  nlohmann::json send(const std::string& method, const std::string& p, const nlohmann::json* body,
                      std::string_view what) const {
    const auto payload = body != nullptr ? body->dump() : std::string();
    httplib::Result res = method == "GET"    ? client->Get(p, headers())
                          : method == "PUT"  ? client->Put(p, headers(), payload, "application/json")
                                             : client->Post(p, headers(), payload, "application/json");
    detail::check_result(res, what, endpoint.base_url + p);
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
      throw ProtocolError(fmt::format("{}: response is not JSON: {}", what, detail::excerpt(res->body)));
    }
  }

  static std::string collection_path(const std::string& name) { return "/collections/" + name; }
};

QdrantStore::QdrantStore(RemoteStoreEndpoint endpoint) : impl_(std::make_unique<Impl>()) {
  impl_->endpoint = std::move(endpoint);
  impl_->url = detail::split_url(impl_->endpoint.base_url);
  impl_->client = detail::make_client(impl_->url, impl_->endpoint.timeout_s);
}

QdrantStore::~QdrantStore() = default;

std::string QdrantStore::point_id(std::string_view key) {
  auto hex = sha256_hex(key).substr(0, 32);
  hex[12] = '5';
  static constexpr char kVariant[] = "89ab";
  hex[16] = kVariant[std::stoi(hex.substr(16, 1), nullptr, 16) & 3];
  return fmt::format("{}-{}-{}-{}-{}", hex.substr(0, 8), hex.substr(8, 4), hex.substr(12, 4),
                     hex.substr(16, 4), hex.substr(20, 12));
}

void QdrantStore::create_collection(const CollectionConfig& cfg) {
  if (cfg.dim == 0) throw ConfigError(fmt::format("collection '{}' needs dim >= 1", cfg.name));
  if (has_collection(cfg.name)) {
    if (!(collection_config(cfg.name) == cfg)) {
      throw ConfigError(fmt::format("collection '{}' exists with a different config", cfg.name));
    }
    return;
  }
  nlohmann::json vectors{{"size", cfg.dim}, {"distance", cfg.metric == Metric::Cosine ? "Cosine" : "Dot"}};
  if (cfg.kind == CollectionKind::LateInteraction) {
    vectors["multivector_config"] = {{"comparator", "max_sim"}};
  }
  const nlohmann::json body{{"vectors", vectors}};
  impl_->send("PUT", impl_->path(Impl::collection_path(cfg.name)), &body, "create collection");
}

bool QdrantStore::has_collection(const std::string& name) const {
  const auto p = impl_->path(Impl::collection_path(name));
  auto res = impl_->client->Get(p, impl_->headers());
  if (res && res->status == 404) return false;
  detail::check_result(res, "get collection", impl_->endpoint.base_url + p);
  return true;
}

CollectionConfig QdrantStore::collection_config(const std::string& name) const {
  const auto j = impl_->send("GET", impl_->path(Impl::collection_path(name)), nullptr, "get collection");
  try {
    const auto& v = j.at("result").at("config").at("params").at("vectors");
    CollectionConfig cfg;
    cfg.name = name;
    cfg.dim = v.at("size").get<std::size_t>();
    cfg.metric = v.at("distance").get<std::string>() == "Cosine" ? Metric::Cosine : Metric::Dot;
    cfg.kind = v.contains("multivector_config") && !v["multivector_config"].is_null()
                   ? CollectionKind::LateInteraction
                   : CollectionKind::Dense;
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(fmt::format("collection info for '{}' malformed: {}", name, e.what()));
  }
}

std::size_t QdrantStore::upsert(const std::string& collection, const std::vector<IndexEntry>& entries) {
  const auto cfg = collection_config(collection);
  check_upsert_batch(cfg, entries);
  const auto p = impl_->path(Impl::collection_path(collection) + "/points?wait=true");
  for (std::size_t start = 0; start < entries.size(); start += batch_size) {
    const std::size_t end = std::min(entries.size(), start + batch_size);
    auto points = nlohmann::json::array();
    for (std::size_t i = start; i < end; ++i) {
      const auto& e = entries[i];
      nlohmann::json point{{"id", point_id(e.key)}, {"payload", {{"key", e.key}, {"ref", e.payload}}}};
      std::visit([&point](const auto& emb) { point["vector"] = emb; }, e.embedding);
      points.push_back(std::move(point));
    }
    const nlohmann::json body{{"points", std::move(points)}};
    impl_->send("PUT", p, &body, "upsert points");
  }
  return entries.size();
}

std::size_t QdrantStore::size(const std::string& collection) const {
  const nlohmann::json body{{"exact", true}};
  const auto j = impl_->send("POST", impl_->path(Impl::collection_path(collection) + "/points/count"), &body,
                             "count points");
  try {
    return j.at("result").at("count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(fmt::format("count response malformed: {}", e.what()));
  }
}

namespace {

std::vector<SearchHit> parse_hits(const nlohmann::json& j, std::size_t k) {
  std::vector<SearchHit> hits;
  try {
    const auto& result = j.at("result");
    const auto& points = result.is_array() ? result : result.at("points");
    for (const auto& p : points) {
      hits.push_back({p.at("payload").at("key").get<std::string>(), p.at("score").get<double>(),
                      p.at("payload").at("ref").get<Payload>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(fmt::format("query response malformed: {}", e.what()));
  }
  std::sort(hits.begin(), hits.end(), hit_before);
  if (hits.size() > k) hits.resize(k);
  return hits;
}

}  // namespace

std::vector<SearchHit> QdrantStore::search_dense(const std::string& collection, const DenseVector& query,
                                                 std::size_t k) const {
  if (k < 1) throw PreconditionError("k must be >= 1");
  const nlohmann::json body{{"query", query}, {"limit", k}, {"with_payload", true}};
  return parse_hits(impl_->send("POST", impl_->path(Impl::collection_path(collection) + "/points/query"), &body,
                                "dense query"),
                    k);
}

std::vector<SearchHit> QdrantStore::search_late_interaction(const std::string& collection,
                                                            const MultiVector& query, std::size_t k) const {
  if (k < 1) throw PreconditionError("k must be >= 1");
  const nlohmann::json body{{"query", query}, {"limit", k}, {"with_payload", true}};
  return parse_hits(impl_->send("POST", impl_->path(Impl::collection_path(collection) + "/points/query"), &body,
                                "late-interaction query"),
                    k);
}

}  // namespace mmrag::index
