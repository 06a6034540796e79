#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "mmrag/errors.hpp"
#include "mmrag/eval/compare.hpp"
#include "mmrag/eval/metrics.hpp"
#include "mmrag/eval/runner.hpp"
#include "mmrag/eval/stats.hpp"
#include "mmrag/gen/stubs.hpp"
#include "mmrag/util.hpp"
#include "oracles.hpp"

using namespace mmrag;
using namespace mmrag::eval;
using corpus::Difficulty;
using corpus::Letter;

namespace {

ItemResult result(std::string id, int run, bool correct, Difficulty d = Difficulty::Easy) {
  ItemResult r;
  r.item_id = std::move(id);
  r.run_index = run;
  r.difficulty = d;
  r.gold = Letter::A;
  r.chosen = correct ? Letter::A : Letter::B;
  r.correct = correct;
  return r;
}

std::vector<ItemResult> run_stub(const std::vector<corpus::BenchmarkItem>& items, const gen::Generator& g, bool permute,
                                 std::uint64_t seed, int n_runs = 5, std::size_t parallelism = 1) {
  RunSpec spec;
  spec.run_id = "r";
  spec.model_id = g.model_id();
  spec.n_runs = n_runs;
  spec.permute_answers = permute;
  spec.rng_seed = seed;
  RunEnvironment env;
  env.generator = &g;
  env.parallelism = parallelism;
  return run_benchmark(items, spec, env);
}

double grand_accuracy(const std::vector<ItemResult>& rs) {
  const auto c = accuracy(rs);
  return static_cast<double>(c.x) / static_cast<double>(c.n);
}

}  // namespace

// ---- intervals

TEST(AgrestiCoull, PublishedIntervals) {
  const auto a = agresti_coull_interval(497, 600);
  EXPECT_NEAR(a.lo, 0.796, 0.0005);
  EXPECT_NEAR(a.hi, 0.856, 0.0005);
  EXPECT_DOUBLE_EQ(a.point, 497.0 / 600.0);
  const auto b = agresti_coull_interval(240, 600);
  EXPECT_NEAR(b.lo, 0.362, 0.0005);
  EXPECT_NEAR(b.hi, 0.440, 0.0005);
}

TEST(AgrestiCoull, FormulaAndClamp) {
  // Independent restatement of the adjusted-proportion formula.
  for (std::size_t n : {1u, 7u, 60u, 600u}) {
    for (std::size_t x = 0; x <= n; x += std::max<std::size_t>(1, n / 7)) {
      const double z = 1.96, nt = n + z * z, pt = (x + z * z / 2) / nt, h = z * std::sqrt(pt * (1 - pt) / nt);
      const auto ci = agresti_coull_interval(x, n);
      EXPECT_NEAR(ci.lo, std::max(0.0, pt - h), 1e-12);
      EXPECT_NEAR(ci.hi, std::min(1.0, pt + h), 1e-12);
      EXPECT_LE(ci.lo, ci.point);
      EXPECT_GE(ci.hi, ci.point);
    }
  }
  EXPECT_EQ(agresti_coull_interval(0, 10).lo, 0.0);
  EXPECT_EQ(agresti_coull_interval(10, 10).hi, 1.0);
  EXPECT_THROW(agresti_coull_interval(0, 0), PreconditionError);
  EXPECT_THROW(agresti_coull_interval(5, 4), PreconditionError);
}

// ---- paired tests

TEST(PairedT, ZeroVarianceIsError) {
  try {
    paired_t_test({0.8, 0.7, 0.9}, {0.8, 0.7, 0.9});
    FAIL();
  } catch (const StatsError& e) {
    EXPECT_NE(std::string(e.what()).find("zero variance"), std::string::npos);
  }
  EXPECT_THROW(paired_t_test({1.0}, {0.0}), StatsError);
  EXPECT_ANY_THROW(paired_t_test({1.0, 2.0}, {0.0}));
}

TEST(PairedT, ConstantShiftWithJitterIsSignificant) {
  const auto r = paired_t_test({2.0, 3.0001, 4.0, 5.0002}, {1.0, 2.0, 3.0001, 4.0});
  EXPECT_GT(r.statistic, 0);
  EXPECT_LT(r.p, 1e-4);
  const auto exact = paired_t_test({2, 3, 4, 5}, {1, 2, 3, 4});
  EXPECT_TRUE(std::isinf(exact.statistic));
  EXPECT_EQ(exact.p, 0.0);
}

TEST(PairedT, TenPairReference) {
  const std::vector<double> a{0.82, 0.79, 0.85, 0.81, 0.80, 0.84, 0.78, 0.83, 0.86, 0.80};
  const std::vector<double> b{0.80, 0.78, 0.81, 0.82, 0.77, 0.80, 0.79, 0.80, 0.82, 0.78};
  // Reference values from an external statistics package.
  constexpr double kT = 3.4733024324458217, kP = 0.007012169754460855;
  const auto r = paired_t_test(a, b);
  EXPECT_NEAR(r.statistic, kT, 1e-9);
  EXPECT_NEAR(r.p, kP, 1e-9);
  EXPECT_NEAR(r.statistic, oracle::paired_t(a, b), 1e-12);
  EXPECT_NEAR(r.p, oracle::t_two_sided_p(oracle::paired_t(a, b), 9), 1e-9);
  EXPECT_EQ(r.n, 10u);
}

TEST(PairedT, MatchesNumericalIntegrationOnRandomFixtures) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> noise(0.1, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 3 + rng() % 20;
    std::vector<double> a(n), b(n, 0.0);
    for (auto& x : a) x = noise(rng);
    const double t = oracle::paired_t(a, b);
    const auto r = paired_t_test(a, b);
    EXPECT_NEAR(r.statistic, t, 1e-9 * std::max(1.0, std::fabs(t)));
    EXPECT_NEAR(r.p, oracle::t_two_sided_p(t, n - 1.0), 1e-8);
  }
}

TEST(Wilcoxon, Examples) {
  const auto all_neg = wilcoxon_signed_rank({1, 2, 3}, {2, 3, 4});
  EXPECT_EQ(all_neg.statistic, 0.0);
  EXPECT_TRUE(all_neg.exact);
  const auto sym = wilcoxon_signed_rank({1, 0}, {0, 1});
  EXPECT_EQ(sym.statistic, 1.5);  // half of 1.5 + 1.5
  EXPECT_EQ(sym.p, 1.0);
  EXPECT_THROW(wilcoxon_signed_rank({1, 2}, {1, 2}), StatsError);
}

TEST(Wilcoxon, EightPairEnumeration) {
  const std::vector<double> a{3, 1, 4, -2, 5, -9, 7, 6}, b(8, 0.0);
  const auto r = wilcoxon_signed_rank(a, b);
  const auto o = oracle::wilcoxon_enumerate(a, b);
  EXPECT_EQ(r.statistic, o.v);
  EXPECT_NEAR(r.p, o.p, 1e-12);
  EXPECT_EQ(r.n, 8u);
  // Also equals an external package's exact value for this tie-free fixture.
  EXPECT_NEAR(r.p, 0.3125, 1e-12);
}

TEST(Wilcoxon, TiesAndZerosAgainstEnumeration) {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng() % 14;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng() % 5);
      b[i] = static_cast<double>(rng() % 5);
    }
    const auto o = oracle::wilcoxon_enumerate(a, b);
    if (o.n == 0) continue;
    const auto r = wilcoxon_signed_rank(a, b);
    EXPECT_EQ(r.n, o.n);
    EXPECT_DOUBLE_EQ(r.statistic, o.v);
    EXPECT_NEAR(r.p, o.p, 1e-12);
  }
}

TEST(Wilcoxon, LargeSampleUsesNormalApproximation) {
  std::mt19937_64 rng(23);
  std::vector<double> a(60), b(60);
  for (std::size_t i = 0; i < 60; ++i) {
    a[i] = static_cast<double>(rng() % 100) + 40;
    b[i] = static_cast<double>(rng() % 100);
  }
  const auto r = wilcoxon_signed_rank(a, b);
  EXPECT_FALSE(r.exact);
  EXPECT_GT(r.p, 0.0);
  EXPECT_LT(r.p, 0.05);
}

TEST(Bonferroni, Examples) {
  EXPECT_NEAR(bonferroni({0.01}, 5)[0], 0.05, 1e-15);
  EXPECT_EQ(bonferroni({0.4}, 3)[0], 1.0);
  const auto v = bonferroni({0.001, 0.02}, 2);
  EXPECT_NEAR(v[0], 0.002, 1e-15);
  EXPECT_NEAR(v[1], 0.04, 1e-15);
  EXPECT_THROW(bonferroni({0.1, 0.2, 0.3}, 2), PreconditionError);
  EXPECT_THROW(bonferroni({1.5}, 1), PreconditionError);
}

// ---- bootstrap

TEST(Bootstrap, Examples) {
  const auto same = bootstrap_ci({0.3, 0.3, 0.3}, 500, 0.95, 1);
  EXPECT_EQ(same.lo, 0.3);
  EXPECT_EQ(same.hi, 0.3);
  const auto two = bootstrap_ci({0.0, 1.0}, 2000, 0.95, 2);
  EXPECT_EQ(two.point, 0.5);
  EXPECT_GE(two.lo, 0.0);
  EXPECT_LE(two.hi, 1.0);
  EXPECT_LE(two.lo, 0.5);
  EXPECT_GE(two.hi, 0.5);
  EXPECT_EQ(two.method, IntervalMethod::BootstrapPercentile);
  EXPECT_THROW(bootstrap_ci({}), StatsError);
  const auto x = bootstrap_ci({1, 2, 3, 4, 9}, 1000, 0.95, 7), y = bootstrap_ci({1, 2, 3, 4, 9}, 1000, 0.95, 7);
  EXPECT_EQ(x.lo, y.lo);
  EXPECT_EQ(x.hi, y.hi);
}

TEST(Bootstrap, CoverageSimulation) {
  std::mt19937_64 rng(24);
  std::exponential_distribution<double> dist(0.5);  // mean 2
  int covered = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> v(100);
    for (auto& x : v) x = dist(rng);
    const auto ci = bootstrap_ci(v, 2000, 0.95, static_cast<std::uint64_t>(rep));
    if (ci.lo <= 2.0 && 2.0 <= ci.hi) ++covered;
  }
  EXPECT_GE(covered, 90);
}

TEST(Quantile, Type7) {
  EXPECT_EQ(quantile_sorted({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_EQ(quantile_sorted({1, 2, 3, 4}, 0.0), 1.0);
  EXPECT_EQ(quantile_sorted({1, 2, 3, 4}, 1.0), 4.0);
  EXPECT_NEAR(quantile_sorted({10, 20, 30}, 0.25), 15.0, 1e-12);
}

// ---- accuracy, precision, cost

TEST(Accuracy, Counts) {
  std::vector<ItemResult> rs;
  for (int i = 0; i < 10; ++i) rs.push_back(result(fmt::format("q{}", i), 0, i < 7, i < 5 ? Difficulty::Easy : Difficulty::Hard));
  EXPECT_EQ(accuracy(rs), (Count{7, 10}));
  EXPECT_EQ(accuracy(rs, Difficulty::Easy), (Count{5, 5}));
  EXPECT_EQ(accuracy(rs, Difficulty::Hard), (Count{2, 5}));
  EXPECT_EQ(accuracy(rs, Difficulty::Medium), (Count{0, 0}));
  rs[0].chosen.reset();
  rs[0].correct = false;
  EXPECT_EQ(accuracy(rs), (Count{6, 10}));
  EXPECT_EQ(parse_failures(rs), 1u);
}

TEST(PrecisionAtK, Examples) {
  const std::vector<augment::TraceEntry> trace{{"a", .9, "d#1"}, {"b", .8, "d#2"}, {"c", .7, "e#1"},
                                               {"e", .6, "e#2"}, {"f", .5, "e#3"}};
  EXPECT_DOUBLE_EQ(precision_at_k(trace, {"d#2"}), 0.2);
  EXPECT_DOUBLE_EQ(precision_at_k(trace, {"x#1"}), 0.0);
  EXPECT_DOUBLE_EQ(precision_at_k({trace[0]}, {"d#1"}), 0.2);  // denominator stays k
  EXPECT_DOUBLE_EQ(precision_at_k({{"a", 1, "d#1"}, {"b", .9, "d#1"}}, {"d#1"}), 0.2);
}

TEST(PrecisionAtK, SourceDocumentPagesOnTwoDocCorpus) {
  corpus::IngestedDocument d1, d2;
  d1.document.id = "d";
  d2.document.id = "e";
  for (int p = 1; p <= 3; ++p) d1.document.pages.push_back({p, {}});
  for (int p = 1; p <= 4; ++p) d2.document.pages.push_back({p, {}});
  const corpus::Corpus c({d1, d2});
  corpus::BenchmarkItem it;
  it.source_doc = "e";
  EXPECT_EQ(gold_page_keys(it, c), (std::set<std::string>{"e#1", "e#2", "e#3", "e#4"}));
  const std::vector<augment::TraceEntry> trace{{"a", .9, "d#1"}, {"b", .8, "e#2"}, {"c", .7, "e#1"},
                                               {"e", .6, "d#3"}, {"f", .5, "e#4"}, {"g", .4, "e#3"}};
  // Hand count: top-5 pages d#1 e#2 e#1 d#3 e#4 -> three from e.
  EXPECT_DOUBLE_EQ(precision_at_k(trace, gold_page_keys(it, c)), 0.6);
  it.gold_pages = {2};
  EXPECT_DOUBLE_EQ(precision_at_k(trace, gold_page_keys(it, c)), 0.2);
  it.source_doc = "missing";
  EXPECT_EQ(gold_page_keys(it, c), (std::set<std::string>{"missing#2"}));
  it.gold_pages.clear();
  EXPECT_TRUE(gold_page_keys(it, c).empty());
}

TEST(Cost, Examples) {
  const ModelPrice price{1.25, 10.0};
  EXPECT_DOUBLE_EQ(request_cost(1000, 500, price), 0.00625);
  EXPECT_EQ(request_cost(0, 0, price), 0.0);
  std::vector<ItemResult> rs;
  for (int i = 0; i < 120; ++i) {
    auto r = result(fmt::format("q{:03d}", i), 0, i < 100);
    r.record.prompt_tokens = 1000;
    r.record.completion_tokens = 500;
    rs.push_back(r);
  }
  const PriceTable table{{"m", price}};
  const double cost = cost_of_results(rs, table, "m");
  EXPECT_EQ(cost, 0.75);
  EXPECT_NEAR(cost, 120 * request_cost(1000, 500, price), 1e-12);
  EXPECT_EQ(price_per_correct(cost, accuracy(rs).x), 0.75);
  EXPECT_THROW(cost_of_results(rs, table, "other"), ConfigError);
  EXPECT_THROW(validate_prices({{"m", {-1.0, 0.0}}}), ConfigError);
}

TEST(Cost, PricePerCorrect) {
  EXPECT_NEAR(*price_per_correct(5.57, 99), 5.6262626, 1e-6);
  EXPECT_EQ(price_per_correct(1.0, 100), 1.0);
  EXPECT_FALSE(price_per_correct(1.0, 0).has_value());
}

TEST(Throughput, Examples) {
  EXPECT_EQ(throughput(400, 1.0), 400.0);
  EXPECT_EQ(throughput(0, 5.0), 0.0);
  EXPECT_THROW(throughput(10, 0.0), PreconditionError);
}

// ---- runs

TEST(Permutation, Bookkeeping) {
  const auto items = testing_support::synthetic_benchmark(1, 0, 0, 3);
  auto it = items[0];
  it.gold = 'A';
  EXPECT_EQ(apply_order(it, corpus::OptionOrder::identity()).item, it);
  const auto swapped = apply_order(it, corpus::OptionOrder({1, 0, 2, 3}));
  EXPECT_EQ(swapped.item.gold, 'B');
  EXPECT_EQ(swapped.item.options[0], it.options[1]);
  EXPECT_EQ(swapped.item.options[1], it.options[0]);
  for (const auto& o : corpus::OptionOrder::all()) {
    for (char g : {'A', 'B', 'C', 'D'}) {
      it.gold = g;
      const auto p = apply_order(it, o);
      EXPECT_EQ(p.item.options[static_cast<std::size_t>(p.item.gold - 'A')], it.options[static_cast<std::size_t>(g - 'A')]);
      EXPECT_EQ(restore_order(p), it);
    }
  }
}

TEST(Permutation, OrderForIsSeededAndRoughlyUniform) {
  EXPECT_EQ(order_for(1, "q1", 0), order_for(1, "q1", 0));
  std::map<std::string, int> counts;
  for (int i = 0; i < 2400; ++i) {
    const auto o = order_for(5, fmt::format("q{}", i), i % 5);
    counts[fmt::format("{}{}{}{}", o.slots()[0], o.slots()[1], o.slots()[2], o.slots()[3])]++;
  }
  EXPECT_EQ(counts.size(), 24u);
  for (const auto& [k, n] : counts) {
    EXPECT_GT(n, 60) << k;
    EXPECT_LT(n, 145) << k;
  }
}

TEST(RunBenchmark, OracleAllCorrect) {
  const auto items = testing_support::synthetic_benchmark(4, 3, 3, 5);
  const gen::OracleGenerator g(items);
  for (bool permute : {false, true}) {
    const auto rs = run_stub(items, g, permute, 1, 2, 4);
    ASSERT_EQ(rs.size(), 20u);
    for (const auto& r : rs) {
      EXPECT_TRUE(r.correct);
      EXPECT_EQ(r.order.is_identity(), !permute || r.order.is_identity());
    }
    EXPECT_EQ(rs.front().item_id, "q000");
    EXPECT_EQ(rs.back().item_id, "q009");
    EXPECT_EQ(rs.back().run_index, 1);
  }
}

TEST(RunBenchmark, AlwaysAUnderPermutationIsAQuarter) {
  const auto items = testing_support::synthetic_benchmark(69, 24, 27, 6);
  const gen::FixedTextGenerator always_a(gen::canonical_answer(Letter::A));
  const double acc = grand_accuracy(run_stub(items, always_a, true, 99, 5, 4));
  EXPECT_NEAR(acc, 0.25, 0.06);
}

TEST(RunBenchmark, RandomGuessIsAQuarter) {
  const auto items = testing_support::synthetic_benchmark(69, 24, 27, 7);
  double total = 0;
  for (std::uint64_t s = 0; s < 30; ++s) total += grand_accuracy(run_stub(items, gen::RandomGuessGenerator(s), false, s));
  EXPECT_NEAR(total / 30, 0.25, 0.03);
}

TEST(RunBenchmark, GenerationErrorsAreRecorded) {
  const auto items = testing_support::synthetic_benchmark(3, 0, 0, 8);
  std::atomic<int> calls{0};
  const gen::ScriptedGenerator flaky([&](const augment::PromptPayload&) -> gen::GenerationRecord {
    if (calls++ % 2 == 0) throw TransportError("upstream 502", 502);
    gen::GenerationRecord r;
    r.raw_text = "not a letter";
    return r;
  });
  const auto rs = run_stub(items, flaky, false, 0, 2);
  ASSERT_EQ(rs.size(), 6u);
  int errors = 0;
  for (const auto& r : rs) {
    EXPECT_TRUE(r.parse_failure());
    EXPECT_FALSE(r.correct);
    if (r.error) ++errors;
  }
  EXPECT_EQ(errors, 3);
}

TEST(RunBenchmark, MissingIndexesFailBeforeRequests) {
  const auto items = testing_support::synthetic_benchmark(2, 0, 0, 9);
  std::atomic<int> calls{0};
  const gen::ScriptedGenerator g([&](const augment::PromptPayload&) -> gen::GenerationRecord {
    ++calls;
    return {};
  });
  RunSpec spec;
  spec.run_id = "r";
  spec.model_id = "m";
  spec.strategy = augment::AugmentationStrategy::text();
  RunEnvironment env;
  env.generator = &g;
  EXPECT_THROW(run_benchmark(items, spec, env), ConfigError);
  EXPECT_EQ(calls.load(), 0);
}

TEST(RunBenchmark, ResumesFromResultsFile) {
  testing_support::TempDir dir("resume");
  const auto file = dir.path() / "results.jsonl";
  const auto items = testing_support::synthetic_benchmark(6, 4, 2, 10);
  const gen::OracleGenerator g(items, {.prompt_tokens = 10, .completion_tokens = 2});
  RunSpec spec;
  spec.run_id = "r";
  spec.model_id = g.model_id();
  spec.n_runs = 3;
  spec.permute_answers = true;
  spec.rng_seed = 4;
  RunEnvironment env;
  env.generator = &g;
  env.parallelism = 3;

  const auto partial = run_benchmark(items, spec, env, {file, 7});
  EXPECT_EQ(partial.size(), 7u);
  EXPECT_EQ(load_results(file).size(), 7u);

  // Simulate a crash in the middle of a write.
  {
    std::ofstream out(file, std::ios::app);
    out << R"({"item_id":"q0)";
  }
  EXPECT_EQ(load_results(file).size(), 7u);

  const auto full = run_benchmark(items, spec, env, {file, std::nullopt});
  ASSERT_EQ(full.size(), 36u);
  const auto reread = load_results(file);
  ASSERT_EQ(reread.size(), 36u);
  for (std::size_t i = 0; i < full.size(); ++i) {
    EXPECT_EQ(nlohmann::json(reread[i]).dump(), nlohmann::json(full[i]).dump());
    EXPECT_EQ(full[i].order, order_for(4, full[i].item_id, full[i].run_index));
  }
  // A further call finds nothing left to do.
  EXPECT_EQ(run_benchmark(items, spec, env, {file, std::nullopt}).size(), 36u);
  EXPECT_EQ(read_file(file.string()), read_file(file.string()));
}

TEST(Results, JsonRoundTripAndConsistency) {
  auto r = result("q1", 2, true, Difficulty::Hard);
  r.record.ttft_ms = 12.5;
  r.retrieval_trace = {{"d#1", 0.5, "d#1"}};
  r.precision_at_k = 0.2;
  const auto j = nlohmann::json(r);
  const auto back = j.get<ItemResult>();
  EXPECT_EQ(nlohmann::json(back), j);
  auto bad = j;
  bad["correct"] = false;
  EXPECT_ANY_THROW(bad.get<ItemResult>());
}

// ---- contamination and pairwise comparisons

TEST(Contamination, OracleIsIdentical) {
  const auto items = testing_support::synthetic_benchmark(10, 5, 5, 11);
  const gen::OracleGenerator g(items);
  const auto rows = contamination_check({{"oracle", run_stub(items, g, false, 1), run_stub(items, g, true, 1)}});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].identical);
  EXPECT_FALSE(rows[0].significant);
  EXPECT_FALSE(rows[0].t.has_value());
  EXPECT_EQ(rows[0].n_pairs, 5u);
}

TEST(Contamination, MemorizedPositionsAreSignificant) {
  const auto items = testing_support::synthetic_benchmark(69, 24, 27, 12);
  const gen::MemorizedPositionGenerator g(items);
  const auto rows = contamination_check({{"memorized", run_stub(items, g, false, 2), run_stub(items, g, true, 2)}});
  EXPECT_TRUE(rows[0].significant);
  EXPECT_EQ(rows[0].plain_accuracy, 1.0);
  EXPECT_LT(rows[0].permuted_accuracy, 0.5);
}

TEST(Contamination, RandomGuessRarelySignificant) {
  const auto items = testing_support::synthetic_benchmark(69, 24, 27, 13);
  // A calibrated level-0.05 test flags about 5% of null repetitions, so the bound is
  // nominal alpha plus three binomial standard errors at 400 repetitions.
  int significant = 0;
  const int reps = 400;
  for (int rep = 0; rep < reps; ++rep) {
    const gen::RandomGuessGenerator a(1000 + rep), b(5000 + rep);
    const auto rows = contamination_check({{"random", run_stub(items, a, false, rep), run_stub(items, b, true, rep)}});
    if (rows[0].significant) ++significant;
  }
  EXPECT_LE(significant, reps * 8 / 100);
}

TEST(Contamination, BonferroniOverCellsAndGridCheck) {
  const auto items = testing_support::synthetic_benchmark(10, 0, 0, 14);
  const gen::MemorizedPositionGenerator m(items);
  const gen::OracleGenerator o(items);
  const auto plain = run_stub(items, m, false, 3), permuted = run_stub(items, m, true, 3);
  const auto rows = contamination_check({{"m", plain, permuted}, {"o", run_stub(items, o, false, 3), run_stub(items, o, true, 3)}});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0].p_adjusted, std::min(1.0, rows[0].p * 2), 1e-15);
  auto short_grid = permuted;
  short_grid.pop_back();
  EXPECT_THROW(contamination_check({{"m", plain, short_grid}}), PreconditionError);
  const auto per_item = contamination_check({{"m", plain, permuted}}, kAlpha, PairingUnit::PerItem);
  EXPECT_EQ(per_item[0].n_pairs, 50u);  // 10 items x 5 runs
}

TEST(Compare, OracleBeatsRandom) {
  const auto items = testing_support::synthetic_benchmark(20, 10, 10, 15);
  const auto oracle_rs = run_stub(items, gen::OracleGenerator(items), false, 0);
  const auto random_rs = run_stub(items, gen::RandomGuessGenerator(3), false, 0);
  const auto c = compare_runs("oracle", oracle_rs, "random", random_rs);
  EXPECT_TRUE(c.significant);
  EXPECT_EQ(c.direction, "random < oracle");
  EXPECT_EQ(c.n_pairs, 200u);
  EXPECT_FALSE(c.exact);
  // V counts pairs the oracle won: every differing pair.
  EXPECT_EQ(c.v, c.n_effective * (c.n_effective + 1) / 2.0);

  const auto all = pairwise_wilcoxon({{"oracle", oracle_rs}, {"random", random_rs}, {"oracle2", oracle_rs}});
  ASSERT_EQ(all.size(), 3u);
  for (const auto& pc : all) EXPECT_NEAR(pc.p_adjusted, std::min(1.0, pc.p * 3), 1e-15);
}
