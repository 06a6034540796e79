#include "mmrag/corpus/benchmark.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

namespace mmrag::corpus {

namespace {

[[noreturn]] void fail(std::size_t record, std::string_view field, std::string_view why) {
  throw SchemaError(fmt::format("record {}: field '{}': {}", record, field, why));
}

std::string string_field(const nlohmann::json& j, std::size_t record, const char* field) {
  if (!j.contains(field)) fail(record, field, "missing");
  if (!j[field].is_string()) fail(record, field, "must be a string");
  return j[field].get<std::string>();
}

BenchmarkItem parse_record(const nlohmann::json& j, std::size_t record) {
  if (!j.is_object()) fail(record, "<record>", "must be an object");
  BenchmarkItem item;
  item.id = string_field(j, record, "id");
  item.question = string_field(j, record, "question");

  if (!j.contains("options")) fail(record, "options", "missing");
  if (!j["options"].is_array()) fail(record, "options", "must be an array");
  for (const auto& o : j["options"]) {
    if (!o.is_string()) fail(record, "options", "entries must be strings");
    item.options.push_back(o.get<std::string>());
  }

  const auto gold = string_field(j, record, "gold");
  if (gold.size() != 1) fail(record, "gold", "must be a single letter");
  item.gold = gold[0];

  const auto diff = string_field(j, record, "difficulty");
  const auto d = parse_difficulty(diff);
  if (!d) fail(record, "difficulty", fmt::format("'{}' not in easy/medium/hard", diff));
  item.difficulty = *d;

  item.source_doc = string_field(j, record, "source_doc");

  if (j.contains("gold_pages")) {
    if (!j["gold_pages"].is_array()) fail(record, "gold_pages", "must be an array");
    for (const auto& p : j["gold_pages"]) {
      if (!p.is_number_integer()) fail(record, "gold_pages", "entries must be integers");
      item.gold_pages.push_back(p.get<int>());
    }
  }

  const auto violations = validate_item(item);
  if (!violations.empty()) {
    // Point at the offending field where the violation names one.
    const auto& first = violations.front();
    std::string_view field = "<record>";
    for (std::string_view f : {"options", "gold_pages", "gold", "question", "source_doc", "id"}) {
      if (first.find(f) != std::string::npos) {
        field = f;
        break;
      }
    }
    fail(record, field, first);
  }
  return item;
}

}  // namespace

StratumCounts stratum_counts(const std::vector<BenchmarkItem>& items) {
  StratumCounts c;
  for (const auto& item : items) ++c.counts[static_cast<std::size_t>(item.difficulty)];
  return c;
}

std::vector<BenchmarkItem> parse_benchmark(std::istream& in) {
  std::vector<BenchmarkItem> items;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(fmt::format("record {}: not valid JSON ({})", record, e.what()));
    }
    auto item = parse_record(j, record);
    if (!ids.insert(item.id).second) {
      throw SchemaError(fmt::format("record {}: field 'id': duplicate id '{}'", record, item.id));
    }
    items.push_back(std::move(item));
    ++record;
  }
  return items;
}

std::vector<BenchmarkItem> load_benchmark(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open benchmark '{}'", path));
  return parse_benchmark(in);
}

void write_benchmark(std::ostream& out, const std::vector<BenchmarkItem>& items) {
  for (const auto& item : items) out << nlohmann::json(item).dump() << '\n';
}

void save_benchmark(const std::string& path, const std::vector<BenchmarkItem>& items) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write benchmark '{}'", path));
  write_benchmark(out, items);
}

}  // namespace mmrag::corpus
