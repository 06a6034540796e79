#include "mmrag/eval/runner.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mmrag/errors.hpp"
#include "mmrag/eval/metrics.hpp"
#include "mmrag/gen/answer.hpp"
#include "mmrag/util.hpp"

namespace mmrag::eval {

void RunSpec::validate() const {
  if (run_id.empty()) throw ConfigError("run spec needs a run_id");
  if (run_id.find_first_of("/\\") != std::string::npos || run_id == "." || run_id == "..") {
    throw ConfigError(fmt::format("run_id '{}' must be a plain name", run_id));
  }
  if (model_id.empty()) throw ConfigError(fmt::format("run '{}' names no model", run_id));
  if (k < 1) throw ConfigError(fmt::format("run '{}': k must be >= 1", run_id));
  if (n_runs < 1) throw ConfigError(fmt::format("run '{}': n_runs must be >= 1", run_id));
}

void to_json(nlohmann::json& j, const RunSpec& s) {
  j = nlohmann::json{{"run_id", s.run_id},         {"model", s.model_id},     {"strategy", s.strategy.name()},
                     {"k", s.k},                   {"n_runs", s.n_runs},      {"permute_answers", s.permute_answers},
                     {"rng_seed", s.rng_seed}};
}

void from_json(const nlohmann::json& j, RunSpec& s) {
  s.run_id = j.at("run_id").get<std::string>();
  s.model_id = j.at("model").get<std::string>();
  s.strategy = augment::AugmentationStrategy::parse(j.value("strategy", std::string("none")));
  s.k = j.value("k", std::size_t{5});
  s.n_runs = j.value("n_runs", 5);
  s.permute_answers = j.value("permute_answers", false);
  s.rng_seed = j.value("rng_seed", std::uint64_t{0});
}

PermutedItem apply_order(const corpus::BenchmarkItem& item, const corpus::OptionOrder& order) {
  PermutedItem p{item, order};
  for (std::size_t slot = 0; slot < corpus::kOptionCount; ++slot) p.item.options[slot] = item.options.at(order.original_at(slot));
  p.item.gold = to_char(order.displayed_letter(item.gold_letter()));
  return p;
}

corpus::BenchmarkItem restore_order(const PermutedItem& permuted) {
  return apply_order(permuted.item, permuted.order.inverse()).item;
}

PermutedItem permute_options(const corpus::BenchmarkItem& item, std::mt19937_64& rng) {
  static const auto kAll = corpus::OptionOrder::all();
  std::uniform_int_distribution<std::size_t> pick(0, kAll.size() - 1);
  return apply_order(item, kAll[pick(rng)]);
}

corpus::OptionOrder order_for(std::uint64_t rng_seed, const std::string& item_id, int run_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(rng_seed), static_cast<std::uint32_t>(rng_seed >> 32),
                    static_cast<std::uint32_t>(fnv1a64(item_id)), static_cast<std::uint32_t>(fnv1a64(item_id) >> 32),
                    static_cast<std::uint32_t>(run_index)};
  std::mt19937_64 rng(seq);
  static const auto kAll = corpus::OptionOrder::all();
  std::uniform_int_distribution<std::size_t> pick(0, kAll.size() - 1);
  return kAll[pick(rng)];
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first) first = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first) std::rethrow_exception(first);
}

std::vector<ItemResult> load_results(const std::filesystem::path& path) {
  std::vector<ItemResult> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::set<std::pair<std::string, int>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const bool last = in.peek() == std::char_traits<char>::eof();
    ItemResult r;
    try {
      r = nlohmann::json::parse(line).get<ItemResult>();
    } catch (const std::exception& e) {
      if (last) {
        spdlog::warn("{}: ignoring truncated final record", path.string());
        break;
      }
      throw SchemaError(fmt::format("{}: line {}: {}", path.string(), lineno, e.what()));
    }
    if (seen.emplace(r.item_id, r.run_index).second) out.push_back(std::move(r));
  }
  sort_results(out);
  return out;
}

namespace {

/// Appends one JSON line per result, flushing each so an interrupt loses at most the
/// record being written.
class ResultWriter {
 public:
  explicit ResultWriter(const std::filesystem::path& path) {
    // Drop a partial trailing line left by an interrupted write.
    std::error_code ec;
    if (std::filesystem::exists(path, ec)) {
      auto data = read_file(path.string());
      const auto cut = data.rfind('\n');
      const auto keep = cut == std::string::npos ? 0 : cut + 1;
      if (keep != data.size()) std::filesystem::resize_file(path, keep);
    } else if (path.has_parent_path()) {
      std::filesystem::create_directories(path.parent_path());
    }
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  }

  void write(const ItemResult& r) {
    const auto line = nlohmann::json(r).dump() + "\n";
    std::lock_guard lock(mu_);
    out_ << line;
    out_.flush();
  }

 private:
  std::mutex mu_;
  std::ofstream out_;
};

ItemResult run_one(const corpus::BenchmarkItem& item, int run_index, const RunSpec& spec, const RunEnvironment& env,
                   const augment::ContextBundle& bundle, const std::optional<double>& p_at_k) {
  const auto order = spec.permute_answers ? order_for(spec.rng_seed, item.id, run_index) : corpus::OptionOrder{};
  ItemResult r;
  r.item_id = item.id;
  r.run_index = run_index;
  r.difficulty = item.difficulty;
  r.order = order;
  r.gold = order.displayed_letter(item.gold_letter());
  r.retrieval_trace = bundle.retrieval_trace;
  r.precision_at_k = p_at_k;
  try {
    const auto payload = augment::assemble_prompt(item, bundle, order, env.limits);
    r.prompt_truncated = payload.truncated;
    r.record = env.generator->complete(payload);
    r.chosen = gen::extract_answer(r.record.raw_text);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    r.error = e.what();
    spdlog::warn("item '{}' run {}: {}", item.id, run_index, e.what());
  }
  r.correct = r.chosen == r.gold;
  return r;
}

}  // namespace

std::vector<ItemResult> run_benchmark(const std::vector<corpus::BenchmarkItem>& items, const RunSpec& spec,
                                      const RunEnvironment& env, const RunOptions& options) {
  spec.validate();
  if (env.generator == nullptr) throw ConfigError("run needs a generator");
  if (spec.strategy.kind() != augment::AugmentationStrategy::Kind::None) {
    if (env.indexes == nullptr) throw ConfigError(fmt::format("strategy '{}' needs indexes", spec.strategy.name()));
    env.indexes->require(spec.strategy);
  }

  std::vector<ItemResult> done;
  std::optional<ResultWriter> writer;
  if (options.results_file) {
    done = load_results(*options.results_file);
    writer.emplace(*options.results_file);
  }
  std::set<std::pair<std::string, int>> have;
  for (const auto& r : done) have.emplace(r.item_id, r.run_index);

  std::vector<std::vector<int>> pending(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (int run = 0; run < spec.n_runs; ++run) {
      if (have.count({items[i].id, run}) == 0) pending[i].push_back(run);
    }
  }

  std::mutex mu;
  std::atomic<std::size_t> claimed{0};
  const auto budget = options.stop_after.value_or(std::numeric_limits<std::size_t>::max());
  const bool retrieves = spec.strategy.kind() != augment::AugmentationStrategy::Kind::None;

  parallel_for(items.size(), env.parallelism, [&](std::size_t i) {
    if (pending[i].empty() || claimed.load() >= budget) return;
    const auto& item = items[i];
    augment::ContextBundle bundle;
    std::optional<double> p_at_k;
    std::optional<std::string> retrieval_error;
    if (retrieves) {
      try {
        bundle = augment::build_context(item, spec.strategy, *env.indexes, spec.k);
        p_at_k = precision_at_k(bundle.retrieval_trace, gold_page_keys(item, *env.indexes->corpus), spec.k);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        retrieval_error = fmt::format("retrieval failed: {}", e.what());
      }
    }
    for (const int run : pending[i]) {
      if (claimed++ >= budget) return;
      ItemResult r;
      if (retrieval_error) {
        r.item_id = item.id;
        r.run_index = run;
        r.difficulty = item.difficulty;
        r.order = spec.permute_answers ? order_for(spec.rng_seed, item.id, run) : corpus::OptionOrder{};
        r.gold = r.order.displayed_letter(item.gold_letter());
        r.error = retrieval_error;
        spdlog::warn("item '{}' run {}: {}", item.id, run, *retrieval_error);
      } else {
        r = run_one(item, run, spec, env, bundle, p_at_k);
      }
      if (writer) writer->write(r);
      std::lock_guard lock(mu);
      done.push_back(std::move(r));
    }
  });

  sort_results(done);
  return done;
}

}  // namespace mmrag::eval
