#pragma once

#include "mmrag/index/vectors.hpp"

namespace mmrag::index {

/// Late-interaction score: sum over query tokens of the best dot product against any
/// document token. Accumulates in double. Throws PreconditionError on dim mismatch.
double maxsim_score(const MultiVector& query, const MultiVector& doc);

}  // namespace mmrag::index
