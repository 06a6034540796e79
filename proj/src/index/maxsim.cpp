#include "mmrag/index/maxsim.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include <fmt/format.h>

#include "mmrag/errors.hpp"

namespace mmrag::index {

namespace {

// Query tokens processed together so each document token is streamed from memory once per tile.
constexpr std::size_t kQueryTile = 4;

}  // namespace

double maxsim_score(const MultiVector& query, const MultiVector& doc) {
  if (query.dim() != doc.dim()) {
    throw PreconditionError(
        fmt::format("maxsim dim mismatch: query {} vs document {}", query.dim(), doc.dim()));
  }
  const std::size_t nq = query.size();
  const std::size_t nd = doc.size();
  if (nq == 0 || nd == 0) throw PreconditionError("maxsim requires non-empty multi-vectors");

  double total = 0.0;
  std::size_t q = 0;
  for (; q + kQueryTile <= nq; q += kQueryTile) {
    std::array<double, kQueryTile> best;
    best.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t d = 0; d < nd; ++d) {
      const auto dt = doc.token(d);
      for (std::size_t t = 0; t < kQueryTile; ++t) {
        best[t] = std::max(best[t], dot(query.token(q + t), dt));
      }
    }
    for (double b : best) total += b;
  }
  for (; q < nq; ++q) {
    double best = -std::numeric_limits<double>::infinity();
    const auto qt = query.token(q);
    for (std::size_t d = 0; d < nd; ++d) best = std::max(best, dot(qt, doc.token(d)));
    total += best;
  }
  return total;
}

}  // namespace mmrag::index
