#include "mmrag/cli/config.hpp"

#include <cstdlib>
#include <regex>
#include <set>

#include <fmt/format.h>

#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

namespace mmrag::cli {

std::string Collections::pages(index::RetrieverId r) const { return pages_prefix + std::string(index::to_string(r)); }

const ModelSection& AppConfig::model(const std::string& name) const {
  const auto it = models.find(name);
  if (it == models.end()) throw ConfigError(fmt::format("model '{}' is not configured", name));
  return it->second;
}

namespace {

const std::set<std::string> kStubKinds = {"oracle", "random", "memorized", "fixed", "summary"};

void check_keys(const nlohmann::json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(fmt::format("'{}' must be an object", section));
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(fmt::format("unknown key '{}' in '{}'", key, section));
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out, std::string_view section) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(fmt::format("'{}.{}' has the wrong type", section, key));
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

ModelSection parse_model(const std::string& name, const nlohmann::json& j) {
  const auto section = "models." + name;
  check_keys(j, section,
             {"kind", "stub", "text", "prompt_tokens", "completion_tokens", "seed", "endpoint", "model_id", "api_key",
              "temperature", "max_images", "timeout_s", "retries", "streaming", "retry_backoff_s", "parallelism"});
  ModelSection m;
  read(j, "kind", m.kind, section);
  read(j, "parallelism", m.parallelism, section);
  auto& g = m.generator;
  g.model_id = name;
  read(j, "model_id", g.model_id, section);
  read(j, "endpoint", g.endpoint, section);
  read(j, "api_key", g.api_key, section);
  if (j.contains("temperature") && !j.at("temperature").is_null()) g.temperature = j.at("temperature").get<double>();
  read(j, "max_images", g.max_images, section);
  read(j, "timeout_s", g.timeout_s, section);
  read(j, "retries", g.retries, section);
  read(j, "streaming", g.streaming, section);
  read(j, "retry_backoff_s", g.retry_backoff_s, section);
  if (m.kind == "stub") {
    read(j, "stub", m.stub, section);
    read(j, "text", m.stub_text, section);
    if (j.contains("prompt_tokens") && !j.at("prompt_tokens").is_null()) {
      m.stub_prompt_tokens = j.at("prompt_tokens").get<std::size_t>();
    }
    read(j, "completion_tokens", m.stub_completion_tokens, section);
    read(j, "seed", m.stub_seed, section);
  } else if (j.contains("seed") && !j.at("seed").is_null()) {
    g.seed = j.at("seed").get<std::int64_t>();
  }
  return m;
}

}  // namespace

void AppConfig::validate() const {
  if (data_dir.empty()) throw ConfigError("data_dir must be set");
  ingestion.validate();
  if (parser.kind == "http") {
    parser.endpoint.validate();
  } else if (parser.kind != "fixture") {
    throw ConfigError(fmt::format("unknown parser kind '{}'", parser.kind));
  }
  if (store.kind == "qdrant") {
    if (store.url.empty()) throw ConfigError("store.url is required for the qdrant store");
  } else if (store.kind != "memory") {
    throw ConfigError(fmt::format("unknown store kind '{}'", store.kind));
  }
  if (embedder.kind == "service") {
    if (embedder.url.empty()) throw ConfigError("embedder.url is required for the embedding service");
  } else if (embedder.kind != "hash") {
    throw ConfigError(fmt::format("unknown embedder kind '{}'", embedder.kind));
  }
  if (embedder.dense_dim == 0 || embedder.multivector_dim == 0) throw ConfigError("embedding dims must be positive");
  for (const auto& [name, m] : models) {
    if (m.kind == "http") {
      if (m.generator.endpoint.empty()) throw ConfigError(fmt::format("model '{}' has no endpoint URL", name));
      m.generator.validate();
    } else if (m.kind == "stub") {
      if (kStubKinds.count(m.stub) == 0) throw ConfigError(fmt::format("model '{}': unknown stub '{}'", name, m.stub));
    } else {
      throw ConfigError(fmt::format("model '{}': unknown kind '{}'", name, m.kind));
    }
    if (m.parallelism < 1) throw ConfigError(fmt::format("model '{}': parallelism must be >= 1", name));
  }
  if (summarizer) model(*summarizer);
  eval::validate_prices(prices);
  if (defaults.k < 1 || defaults.n_runs < 1 || defaults.bootstrap_samples < 1) {
    throw ConfigError("defaults.k, defaults.n_runs and defaults.bootstrap_samples must be >= 1");
  }
}

std::string interpolate_env(std::string_view text) {
  static const std::regex re(R"(\$\{([A-Za-z_][A-Za-z0-9_]*)(?::-([^}]*))?\})");
  std::string out;
  std::string s(text);
  auto begin = std::sregex_iterator(s.begin(), s.end(), re);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(s, last, static_cast<std::size_t>(m.position(0)) - last);
    const char* v = std::getenv(m[1].str().c_str());
    out += (v != nullptr && *v != '\0') ? std::string(v) : (m[2].matched ? m[2].str() : std::string());
    last = static_cast<std::size_t>(m.position(0) + m.length(0));
  }
  out.append(s, last, std::string::npos);
  return out;
}

void apply_override(nlohmann::json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError(fmt::format("override '{}' must look like key.path=value", assignment));
  }
  const auto path = assignment.substr(0, eq);
  const std::string raw(assignment.substr(eq + 1));
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  nlohmann::json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key(path.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (key.empty()) throw ConfigError(fmt::format("override '{}' has an empty key", assignment));
    if (!node->is_object()) *node = nlohmann::json::object();
    node = &(*node)[key];
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

AppConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc, "config",
             {"data_dir", "benchmark", "parser", "store", "embedder", "collections", "ingestion", "models", "prices",
              "defaults"});
  AppConfig c;
  std::string s;
  if (doc.contains("data_dir")) c.data_dir = resolve(base_dir, doc.at("data_dir").get<std::string>());
  if (doc.contains("benchmark")) c.benchmark = resolve(base_dir, doc.at("benchmark").get<std::string>());

  if (doc.contains("parser")) {
    const auto& j = doc.at("parser");
    check_keys(j, "parser", {"kind", "fixture_dir", "base_url", "api_key", "timeout_s", "record_dir"});
    read(j, "kind", c.parser.kind, "parser");
    if (j.contains("fixture_dir")) c.parser.fixture_dir = resolve(base_dir, j.at("fixture_dir").get<std::string>());
    if (j.contains("record_dir")) c.parser.record_dir = resolve(base_dir, j.at("record_dir").get<std::string>());
    read(j, "base_url", c.parser.endpoint.base_url, "parser");
    read(j, "api_key", c.parser.endpoint.api_key, "parser");
    read(j, "timeout_s", c.parser.endpoint.timeout_s, "parser");
  }
  if (doc.contains("store")) {
    const auto& j = doc.at("store");
    check_keys(j, "store", {"kind", "url", "api_key", "timeout_s"});
    read(j, "kind", c.store.kind, "store");
    read(j, "url", c.store.url, "store");
    read(j, "api_key", c.store.api_key, "store");
    read(j, "timeout_s", c.store.timeout_s, "store");
  }
  if (doc.contains("embedder")) {
    const auto& j = doc.at("embedder");
    check_keys(j, "embedder", {"kind", "url", "api_key", "timeout_s", "dense_dim", "multivector_dim", "page_tokens", "seed"});
    read(j, "kind", c.embedder.kind, "embedder");
    read(j, "url", c.embedder.url, "embedder");
    read(j, "api_key", c.embedder.api_key, "embedder");
    read(j, "timeout_s", c.embedder.timeout_s, "embedder");
    read(j, "dense_dim", c.embedder.dense_dim, "embedder");
    read(j, "multivector_dim", c.embedder.multivector_dim, "embedder");
    read(j, "page_tokens", c.embedder.page_tokens, "embedder");
    read(j, "seed", c.embedder.seed, "embedder");
  }
  if (doc.contains("collections")) {
    const auto& j = doc.at("collections");
    check_keys(j, "collections", {"text", "multimodal", "pages_prefix"});
    read(j, "text", c.collections.text, "collections");
    read(j, "multimodal", c.collections.multimodal, "collections");
    read(j, "pages_prefix", c.collections.pages_prefix, "collections");
  }
  if (doc.contains("ingestion")) {
    const auto& j = doc.at("ingestion");
    check_keys(j, "ingestion", {"token_budget", "image_long_side_px", "summarize_assets", "summarizer"});
    read(j, "token_budget", c.ingestion.token_budget, "ingestion");
    read(j, "image_long_side_px", c.ingestion.image_long_side_px, "ingestion");
    read(j, "summarize_assets", c.ingestion.summarize_assets, "ingestion");
    if (j.contains("summarizer") && !j.at("summarizer").is_null()) c.summarizer = j.at("summarizer").get<std::string>();
  }
  if (doc.contains("models")) {
    for (const auto& [name, j] : doc.at("models").items()) c.models.emplace(name, parse_model(name, j));
  }
  if (doc.contains("prices")) {
    for (const auto& [name, j] : doc.at("prices").items()) {
      check_keys(j, "prices." + name, {"input_per_1m", "output_per_1m"});
      try {
        c.prices.emplace(name, j.get<eval::ModelPrice>());
      } catch (const nlohmann::json::exception&) {
        throw ConfigError(fmt::format("prices.{} needs numeric input_per_1m and output_per_1m", name));
      }
    }
  }
  if (doc.contains("defaults")) {
    const auto& j = doc.at("defaults");
    check_keys(j, "defaults", {"k", "n_runs", "rng_seed", "bootstrap_samples", "bootstrap_seed"});
    read(j, "k", c.defaults.k, "defaults");
    read(j, "n_runs", c.defaults.n_runs, "defaults");
    read(j, "rng_seed", c.defaults.rng_seed, "defaults");
    read(j, "bootstrap_samples", c.defaults.bootstrap_samples, "defaults");
    read(j, "bootstrap_seed", c.defaults.bootstrap_seed, "defaults");
  }
  c.validate();
  return c;
}

namespace {

// Interpolates string values only, so secrets never need JSON escaping.
void interpolate_strings(nlohmann::json& j) {
  if (j.is_string()) {
    j = interpolate_env(j.get<std::string>());
  } else if (j.is_structured()) {
    for (auto& child : j) interpolate_strings(child);
  }
}

}  // namespace

AppConfig load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides) {
  nlohmann::json doc = nlohmann::json::object();
  std::filesystem::path base = std::filesystem::current_path();
  if (path) {
    std::string text;
    try {
      text = read_file(path->string());
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ConfigError(fmt::format("config '{}' is not valid JSON", path->string()));
    interpolate_strings(doc);
    base = std::filesystem::absolute(*path).parent_path();
  }
  for (const auto& o : overrides) apply_override(doc, interpolate_env(o));
  return parse_config(doc, base);
}

nlohmann::json public_model_json(const ModelSection& m) {
  nlohmann::json j{{"kind", m.kind}, {"model_id", m.generator.model_id}};
  if (m.kind == "stub") {
    j["stub"] = m.stub;
    j["text"] = m.stub_text;
    j["prompt_tokens"] = m.stub_prompt_tokens ? nlohmann::json(*m.stub_prompt_tokens) : nlohmann::json();
    j["completion_tokens"] = m.stub_completion_tokens;
    j["seed"] = m.stub_seed;
  } else {
    const auto& g = m.generator;
    j["endpoint"] = redact_url(g.endpoint);
    j["temperature"] = g.temperature ? nlohmann::json(*g.temperature) : nlohmann::json();
    j["seed"] = g.seed ? nlohmann::json(*g.seed) : nlohmann::json();
    j["max_images"] = g.max_images;
    j["streaming"] = g.streaming;
  }
  return j;
}

}  // namespace mmrag::cli
