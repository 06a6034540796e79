#include "mmrag/gen/answer.hpp"

#include <regex>
#include <string>

#include <json.hpp>

#include "mmrag/util.hpp"

namespace mmrag::gen {

namespace {

std::optional<corpus::Letter> strict(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (!j.is_object() || !j.contains("query_answer") || !j["query_answer"].is_string()) return std::nullopt;
  return corpus::parse_letter(trim(j["query_answer"].get_ref<const std::string&>()));
}

std::optional<corpus::Letter> scan(std::string_view text) {
  static const std::regex pattern(R"(query_answer["']?\s*[:=]\s*["']?\s*([A-D])(?![A-Za-z0-9_]))");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(text.begin(), text.end(), m, pattern)) return std::nullopt;
  return corpus::parse_letter(std::string_view(&*m[1].first, 1));
}

}  // namespace

std::optional<corpus::Letter> extract_answer(std::string_view raw) noexcept {
  try {
    const auto text = trim(raw);
    if (auto l = strict(text)) return l;
    if (auto l = scan(text)) return l;
    return corpus::parse_letter(text);
  } catch (...) {
    return std::nullopt;
  }
}

}  // namespace mmrag::gen
