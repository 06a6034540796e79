#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mmrag::index {

inline constexpr std::size_t kDefaultDenseDim = 768;
inline constexpr std::size_t kDefaultMultiVectorDim = 128;

/// Single pooled embedding.
class DenseVector {
 public:
  DenseVector() = default;
  /// Throws PreconditionError on empty input or non-finite values.
  explicit DenseVector(std::vector<float> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const float> values() const noexcept { return values_; }
  double norm() const noexcept;

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  std::vector<float> values_;
};

/// Token/patch embeddings of one page or query, stored row-major (tokens x dim).
class MultiVector {
 public:
  MultiVector() = default;
  /// `flat.size()` must be a non-zero multiple of `dim`; all values finite.
  MultiVector(std::size_t dim, std::vector<float> flat);
  static MultiVector from_rows(const std::vector<std::vector<float>>& rows);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::span<const float> token(std::size_t i) const noexcept {
    return std::span<const float>(data_).subspan(i * dim_, dim_);
  }
  std::span<const float> flat() const noexcept { return data_; }
  std::vector<std::vector<float>> rows() const;

  friend bool operator==(const MultiVector&, const MultiVector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

enum class RetrieverId { ColPali, ColQwen, ColFlor };

inline constexpr RetrieverId kAllRetrievers[] = {RetrieverId::ColPali, RetrieverId::ColQwen,
                                                 RetrieverId::ColFlor};

std::string_view to_string(RetrieverId r) noexcept;
/// Case-insensitive: "colpali", "colqwen", "colflor".
std::optional<RetrieverId> parse_retriever(std::string_view s) noexcept;
/// Model repository served for each retriever.
std::string_view model_repo(RetrieverId r) noexcept;

/// Dot product accumulated in double.
double dot(std::span<const float> a, std::span<const float> b) noexcept;
double cosine(const DenseVector& a, const DenseVector& b);

void to_json(nlohmann::json& j, const DenseVector& v);
void from_json(const nlohmann::json& j, DenseVector& v);
void to_json(nlohmann::json& j, const MultiVector& v);
void from_json(const nlohmann::json& j, MultiVector& v);

}  // namespace mmrag::index
