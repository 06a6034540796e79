#include "mmrag/index/vectors.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

namespace mmrag::index {

namespace {

void require_finite(std::span<const float> values) {
  for (float v : values) {
    if (!std::isfinite(v)) throw PreconditionError("embedding contains a non-finite value");
  }
}

}  // namespace

DenseVector::DenseVector(std::vector<float> values) : values_(std::move(values)) {
  if (values_.empty()) throw PreconditionError("dense vector must have dim >= 1");
  require_finite(values_);
}

double DenseVector::norm() const noexcept { return std::sqrt(dot(values_, values_)); }

MultiVector::MultiVector(std::size_t dim, std::vector<float> flat) : dim_(dim), data_(std::move(flat)) {
  if (dim_ == 0) throw PreconditionError("multi-vector dim must be >= 1");
  if (data_.empty()) throw PreconditionError("multi-vector must hold at least one token");
  if (data_.size() % dim_ != 0) {
    throw PreconditionError(fmt::format("multi-vector payload of {} values is not a multiple of dim {}",
                                        data_.size(), dim_));
  }
  require_finite(data_);
}

MultiVector MultiVector::from_rows(const std::vector<std::vector<float>>& rows) {
  if (rows.empty()) throw PreconditionError("multi-vector must hold at least one token");
  const std::size_t dim = rows.front().size();
  std::vector<float> flat;
  flat.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw PreconditionError("multi-vector token dims differ");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return MultiVector(dim, std::move(flat));
}

std::vector<std::vector<float>> MultiVector::rows() const {
  std::vector<std::vector<float>> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto t = token(i);
    out.emplace_back(t.begin(), t.end());
  }
  return out;
}

std::string_view to_string(RetrieverId r) noexcept {
  switch (r) {
    case RetrieverId::ColPali: return "colpali";
    case RetrieverId::ColQwen: return "colqwen";
    case RetrieverId::ColFlor: return "colflor";
  }
  return "colpali";
}

std::optional<RetrieverId> parse_retriever(std::string_view s) noexcept {
  const auto lower = to_lower(s);
  if (lower == "colpali") return RetrieverId::ColPali;
  if (lower == "colqwen" || lower == "colqwen2") return RetrieverId::ColQwen;
  if (lower == "colflor") return RetrieverId::ColFlor;
  return std::nullopt;
}

std::string_view model_repo(RetrieverId r) noexcept {
  switch (r) {
    case RetrieverId::ColPali: return "vidore/colpali-v1.3-merged";
    case RetrieverId::ColQwen: return "vidore/colqwen2-v0.2";
    case RetrieverId::ColFlor: return "ahmed-masry/ColFlor";
  }
  return "";
}

double dot(std::span<const float> a, std::span<const float> b) noexcept {
  // Four independent accumulators; the result differs from a serial sum only by associativity.
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += static_cast<double>(a[i]) * b[i];
    s1 += static_cast<double>(a[i + 1]) * b[i + 1];
    s2 += static_cast<double>(a[i + 2]) * b[i + 2];
    s3 += static_cast<double>(a[i + 3]) * b[i + 3];
  }
  for (; i < n; ++i) s0 += static_cast<double>(a[i]) * b[i];
  return (s0 + s1) + (s2 + s3);
}

double cosine(const DenseVector& a, const DenseVector& b) {
  if (a.dim() != b.dim()) {
    throw PreconditionError(fmt::format("dim mismatch: {} vs {}", a.dim(), b.dim()));
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = dot(a.values(), b.values()) / (na * nb);
  return c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
}

void to_json(nlohmann::json& j, const DenseVector& v) {
  j = std::vector<float>(v.values().begin(), v.values().end());
}

void from_json(const nlohmann::json& j, DenseVector& v) { v = DenseVector(j.get<std::vector<float>>()); }

void to_json(nlohmann::json& j, const MultiVector& v) { j = v.rows(); }

void from_json(const nlohmann::json& j, MultiVector& v) {
  v = MultiVector::from_rows(j.get<std::vector<std::vector<float>>>());
}

}  // namespace mmrag::index
