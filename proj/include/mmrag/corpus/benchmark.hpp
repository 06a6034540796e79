#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmrag/corpus/types.hpp"

namespace mmrag::corpus {

/// Item counts per difficulty stratum, indexed by Difficulty.
struct StratumCounts {
  std::array<std::size_t, 3> counts{};

  std::size_t operator[](Difficulty d) const noexcept { return counts[static_cast<std::size_t>(d)]; }
  std::size_t total() const noexcept { return counts[0] + counts[1] + counts[2]; }
};

StratumCounts stratum_counts(const std::vector<BenchmarkItem>& items);

/// Parses line-delimited JSON records (one item per line, blank lines ignored).
/// Throws SchemaError naming the (0-based) record index and field on the first bad record,
/// and on duplicate ids.
std::vector<BenchmarkItem> parse_benchmark(std::istream& in);
std::vector<BenchmarkItem> load_benchmark(const std::string& path);

void write_benchmark(std::ostream& out, const std::vector<BenchmarkItem>& items);
void save_benchmark(const std::string& path, const std::vector<BenchmarkItem>& items);

}  // namespace mmrag::corpus
