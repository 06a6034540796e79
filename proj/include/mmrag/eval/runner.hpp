#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmrag/augment/context.hpp"
#include "mmrag/augment/prompt.hpp"
#include "mmrag/eval/results.hpp"
#include "mmrag/gen/generator.hpp"

namespace mmrag::eval {

struct RunSpec {
  std::string run_id;
  std::string model_id;
  augment::AugmentationStrategy strategy = augment::AugmentationStrategy::none();
  std::size_t k = 5;
  int n_runs = 5;
  bool permute_answers = false;
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

void to_json(nlohmann::json& j, const RunSpec& s);
void from_json(const nlohmann::json& j, RunSpec& s);

struct PermutedItem {
  corpus::BenchmarkItem item;  // options in display order, gold remapped
  corpus::OptionOrder order;
};

/// Shows `item` under `order`; the gold letter follows its option text.
PermutedItem apply_order(const corpus::BenchmarkItem& item, const corpus::OptionOrder& order);
/// Inverse of apply_order.
corpus::BenchmarkItem restore_order(const PermutedItem& permuted);
/// Uniformly random display order.
PermutedItem permute_options(const corpus::BenchmarkItem& item, std::mt19937_64& rng);

/// Order used for (item, run) under a seed; independent of scheduling.
corpus::OptionOrder order_for(std::uint64_t rng_seed, const std::string& item_id, int run_index);

/// Everything a run talks to besides its spec.
struct RunEnvironment {
  const gen::Generator* generator = nullptr;
  /// May be null under the None strategy.
  const augment::RetrievalIndexes* indexes = nullptr;
  augment::PromptLimits limits;
  /// Requests in flight at once.
  std::size_t parallelism = 1;
};

struct RunOptions {
  /// Line-delimited results file: existing (item, run) pairs are skipped and new results
  /// appended as they complete.
  std::optional<std::filesystem::path> results_file;
  /// Stop after this many new results, as if interrupted.
  std::optional<std::size_t> stop_after;
};

/// Runs every item spec.n_runs times. Returns all results known for the run (including
/// those loaded from `results_file`) in (item_id, run_index) order. Per-item failures are
/// recorded as parse failures with an error note; missing indexes throw ConfigError before
/// any request.
std::vector<ItemResult> run_benchmark(const std::vector<corpus::BenchmarkItem>& items, const RunSpec& spec,
                                      const RunEnvironment& env, const RunOptions& options = {});

/// Reads a results file. A truncated final line (an interrupted write) is ignored;
/// duplicate (item, run) pairs keep the first record. Returned in (item_id, run_index) order.
std::vector<ItemResult> load_results(const std::filesystem::path& path);

/// Runs fn(0..n-1) on up to `workers` threads; rethrows the first exception.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace mmrag::eval
