#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mmrag/corpus/types.hpp"
#include "mmrag/index/vectors.hpp"

namespace testing_support {

inline std::filesystem::path fixture_dir() { return MMRAG_FIXTURE_DIR; }

/// Fresh empty directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / fmt::format("mmrag-{}-{:x}", tag, rd());
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Benchmark with the given stratum sizes, uniformly random gold letters and distinct options.
inline std::vector<mmrag::corpus::BenchmarkItem> synthetic_benchmark(std::size_t easy, std::size_t medium,
                                                                     std::size_t hard, std::uint64_t seed) {
  using mmrag::corpus::Difficulty;
  std::mt19937_64 rng(seed);
  std::vector<mmrag::corpus::BenchmarkItem> items;
  const auto add = [&](std::size_t n, Difficulty d) {
    for (std::size_t i = 0; i < n; ++i) {
      mmrag::corpus::BenchmarkItem it;
      it.id = fmt::format("q{:03d}", items.size());
      it.question = fmt::format("Synthetic question {} about topic {}?", items.size(), rng() % 97);
      for (int o = 0; o < 4; ++o) it.options.push_back(fmt::format("option {} of {}", o, items.size()));
      it.gold = static_cast<char>('A' + rng() % 4);
      it.difficulty = d;
      it.source_doc = fmt::format("doc{}", items.size() % 3);
      items.push_back(it);
    }
  };
  add(easy, Difficulty::Easy);
  add(medium, Difficulty::Medium);
  add(hard, Difficulty::Hard);
  return items;
}

inline std::vector<std::vector<float>> random_rows(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                                                   float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> u(lo, hi);
  std::vector<std::vector<float>> rows(n, std::vector<float>(dim));
  for (auto& r : rows) {
    for (auto& x : r) x = u(rng);
  }
  return rows;
}

}  // namespace testing_support
