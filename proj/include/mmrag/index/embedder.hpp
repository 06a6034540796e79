#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mmrag/corpus/types.hpp"
#include "mmrag/index/vectors.hpp"

namespace mmrag::index {

/// Produces text and page/query embeddings. Implementations must be deterministic for a
/// fixed backend and safe for concurrent calls.
class Embedder {
 public:
  virtual ~Embedder() = default;

  /// Throws PreconditionError when `text` is blank.
  virtual DenseVector embed_text(std::string_view text) const = 0;
  /// Throws PreconditionError when the image exceeds the normalized size cap.
  virtual MultiVector embed_page(const corpus::PageImage& image, RetrieverId retriever) const = 0;
  virtual MultiVector embed_query(std::string_view text, RetrieverId retriever) const = 0;

  virtual std::size_t dense_dim() const = 0;
  virtual std::size_t multivector_dim(RetrieverId retriever) const = 0;
};

struct HashEmbedderOptions {
  std::size_t dense_dim = kDefaultDenseDim;
  std::size_t multivector_dim = kDefaultMultiVectorDim;
  std::size_t page_tokens = 4;
  std::uint64_t seed = 0;
  int max_image_side = 1300;
};

/// Offline stand-in for the embedding service.
///  - text: bag-of-words sum of per-word pseudo-random vectors, unit-normalized, so
///    texts sharing words are similar;
///  - query multi-vector: one token per word;
///  - page multi-vector: `page_tokens` vectors seeded by the image bytes and retriever.
class HashEmbedder final : public Embedder {
 public:
  explicit HashEmbedder(HashEmbedderOptions options = {});

  DenseVector embed_text(std::string_view text) const override;
  MultiVector embed_page(const corpus::PageImage& image, RetrieverId retriever) const override;
  MultiVector embed_query(std::string_view text, RetrieverId retriever) const override;
  std::size_t dense_dim() const override { return options_.dense_dim; }
  std::size_t multivector_dim(RetrieverId) const override { return options_.multivector_dim; }

  /// Deterministic vector with entries uniform in [-1, 1).
  static std::vector<float> seeded_vector(std::uint64_t seed, std::size_t dim);

 private:
  HashEmbedderOptions options_;
};

/// Request kinds of the embedding service contract.
enum class EmbedKind { TextDense, PageMultiVector, QueryMultiVector };

std::string_view to_string(EmbedKind k) noexcept;

/// Schema check of an embedding-service response; returns every violation found.
std::vector<std::string> validate_embed_response(const nlohmann::json& response, EmbedKind kind);

struct EmbedServiceEndpoint {
  std::string base_url;
  std::string api_key;  // optional, sent as a bearer token
  double timeout_s = 60.0;
  std::size_t dense_dim = kDefaultDenseDim;
  std::size_t multivector_dim = kDefaultMultiVectorDim;
  int max_image_side = 1300;
};

struct EmbedServiceHealth {
  std::string status;
  std::vector<std::string> models;
};

/// Client of the embedding service: POST {base}/embed, GET {base}/health.
class EmbedServiceClient final : public Embedder {
 public:
  explicit EmbedServiceClient(EmbedServiceEndpoint endpoint);
  ~EmbedServiceClient() override;

  DenseVector embed_text(std::string_view text) const override;
  MultiVector embed_page(const corpus::PageImage& image, RetrieverId retriever) const override;
  MultiVector embed_query(std::string_view text, RetrieverId retriever) const override;
  std::size_t dense_dim() const override { return endpoint_.dense_dim; }
  std::size_t multivector_dim(RetrieverId) const override { return endpoint_.multivector_dim; }

  EmbedServiceHealth health() const;

 private:
  nlohmann::json call(const nlohmann::json& request, EmbedKind kind) const;

  EmbedServiceEndpoint endpoint_;
  struct Http;
  std::unique_ptr<Http> http_;
};

}  // namespace mmrag::index
