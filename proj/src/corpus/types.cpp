#include "mmrag/corpus/types.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

namespace mmrag::corpus {

std::string_view to_string(Difficulty d) noexcept {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Medium: return "medium";
    case Difficulty::Hard: return "hard";
  }
  return "easy";
}

std::optional<Difficulty> parse_difficulty(std::string_view s) noexcept {
  if (s == "easy") return Difficulty::Easy;
  if (s == "medium") return Difficulty::Medium;
  if (s == "hard") return Difficulty::Hard;
  return std::nullopt;
}

std::optional<Letter> parse_letter(std::string_view s) noexcept {
  if (s.size() != 1 || s[0] < 'A' || s[0] > 'D') return std::nullopt;
  return letter_at(static_cast<std::size_t>(s[0] - 'A'));
}

OptionOrder::OptionOrder(std::array<std::uint8_t, kOptionCount> slots) : slots_(slots) {
  auto sorted = slots;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < kOptionCount; ++i) {
    if (sorted[i] != i) throw PreconditionError("option order is not a permutation of 0..3");
  }
}

std::vector<OptionOrder> OptionOrder::all() {
  std::array<std::uint8_t, kOptionCount> slots{0, 1, 2, 3};
  std::vector<OptionOrder> out;
  do {
    out.emplace_back(slots);
  } while (std::next_permutation(slots.begin(), slots.end()));
  return out;
}

Letter OptionOrder::displayed_letter(Letter original) const noexcept {
  for (std::size_t i = 0; i < kOptionCount; ++i) {
    if (slots_[i] == index_of(original)) return letter_at(i);
  }
  return original;
}

OptionOrder OptionOrder::inverse() const noexcept {
  OptionOrder inv;
  for (std::size_t i = 0; i < kOptionCount; ++i) inv.slots_[slots_[i]] = static_cast<std::uint8_t>(i);
  return inv;
}

Letter BenchmarkItem::gold_letter() const {
  const auto l = parse_letter(std::string_view(&gold, 1));
  if (!l) throw PreconditionError(fmt::format("item '{}': gold not in {{A,B,C,D}}", id));
  return *l;
}

std::vector<std::string> validate_item(const BenchmarkItem& item) {
  std::vector<std::string> v;
  if (item.id.empty()) v.emplace_back("id empty");
  if (trim(item.question).empty()) v.emplace_back("question empty");
  if (item.options.size() != kOptionCount) {
    v.push_back(fmt::format("options must have exactly 4 entries (got {})", item.options.size()));
  }
  std::set<std::string> distinct(item.options.begin(), item.options.end());
  if (distinct.size() != item.options.size()) v.emplace_back("options not distinct");
  if (item.gold < 'A' || item.gold > 'D') {
    v.emplace_back("gold not in {A,B,C,D}");
  } else if (static_cast<std::size_t>(item.gold - 'A') >= item.options.size()) {
    v.emplace_back("gold does not index an existing option");
  }
  if (item.source_doc.empty()) v.emplace_back("source_doc empty");
  for (int p : item.gold_pages) {
    if (p < 1) {
      v.emplace_back("gold_pages must be 1-based");
      break;
    }
  }
  return v;
}

std::string_view to_string(ElementKind k) noexcept {
  switch (k) {
    case ElementKind::Heading: return "heading";
    case ElementKind::Paragraph: return "paragraph";
    case ElementKind::Caption: return "caption";
    case ElementKind::Table: return "table";
    case ElementKind::Figure: return "figure";
  }
  return "paragraph";
}

std::optional<ElementKind> parse_element_kind(std::string_view s) noexcept {
  if (s == "heading") return ElementKind::Heading;
  if (s == "paragraph") return ElementKind::Paragraph;
  if (s == "caption") return ElementKind::Caption;
  if (s == "table") return ElementKind::Table;
  if (s == "figure") return ElementKind::Figure;
  return std::nullopt;
}

std::string_view to_string(ImageEncoding e) noexcept {
  return e == ImageEncoding::Png ? "png" : "jpeg";
}

std::string_view mime_type(ImageEncoding e) noexcept {
  return e == ImageEncoding::Png ? "image/png" : "image/jpeg";
}

std::string_view to_string(AssetKind k) noexcept { return k == AssetKind::Table ? "table" : "figure"; }

std::vector<std::string> validate_document(const SourceDocument& doc) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < doc.pages.size(); ++i) {
    if (doc.pages[i].number != static_cast<int>(i) + 1) {
      v.push_back(fmt::format("page numbers not contiguous from 1 (position {} has {})", i,
                              doc.pages[i].number));
      break;
    }
  }
  const int n_pages = static_cast<int>(doc.pages.size());
  for (const auto& a : doc.assets) {
    if (a.page < 1 || a.page > n_pages) {
      v.push_back(fmt::format("asset '{}' references missing page {}", a.id, a.page));
    }
  }
  for (const auto& e : doc.elements) {
    if (e.page < 1 || e.page > n_pages) {
      v.push_back(fmt::format("element references missing page {}", e.page));
      break;
    }
  }
  return v;
}

std::string page_key(std::string_view doc_id, int page) { return fmt::format("{}#{}", doc_id, page); }

// ---- JSON ----

void to_json(nlohmann::json& j, const BenchmarkItem& item) {
  j = nlohmann::json{{"id", item.id},
                     {"question", item.question},
                     {"options", item.options},
                     {"gold", std::string(1, item.gold)},
                     {"difficulty", to_string(item.difficulty)},
                     {"source_doc", item.source_doc}};
  if (!item.gold_pages.empty()) j["gold_pages"] = item.gold_pages;
}

void to_json(nlohmann::json& j, const PageImage& img) {
  j = nlohmann::json{{"width_px", img.width_px},
                     {"height_px", img.height_px},
                     {"encoding", to_string(img.encoding)},
                     {"data_b64", base64_encode(img.bytes)}};
}

void from_json(const nlohmann::json& j, PageImage& img) {
  img.width_px = j.at("width_px").get<int>();
  img.height_px = j.at("height_px").get<int>();
  const auto enc = j.at("encoding").get<std::string>();
  if (enc == "png") {
    img.encoding = ImageEncoding::Png;
  } else if (enc == "jpeg") {
    img.encoding = ImageEncoding::Jpeg;
  } else {
    throw SchemaError(fmt::format("unknown image encoding '{}'", enc));
  }
  img.bytes = base64_decode(j.at("data_b64").get<std::string>());
}

void to_json(nlohmann::json& j, const SourceDocument& doc) {
  auto pages = nlohmann::json::array();
  for (const auto& p : doc.pages) pages.push_back({{"number", p.number}, {"image", p.image}});
  auto assets = nlohmann::json::array();
  for (const auto& a : doc.assets) {
    nlohmann::json ja{{"id", a.id}, {"kind", to_string(a.kind)}, {"page", a.page}, {"image", a.image}};
    ja["caption"] = a.caption ? nlohmann::json(*a.caption) : nlohmann::json();
    ja["summary"] = a.summary ? nlohmann::json{{"text", a.summary->text},
                                               {"token_count", a.summary->token_count}}
                              : nlohmann::json();
    assets.push_back(std::move(ja));
  }
  auto elements = nlohmann::json::array();
  for (const auto& e : doc.elements) {
    elements.push_back({{"kind", to_string(e.kind)}, {"text", e.text}, {"page", e.page}});
  }
  j = nlohmann::json{{"id", doc.id},
                     {"title", doc.title},
                     {"pages", std::move(pages)},
                     {"assets", std::move(assets)},
                     {"elements", std::move(elements)}};
}

void from_json(const nlohmann::json& j, SourceDocument& doc) {
  doc.id = j.at("id").get<std::string>();
  doc.title = j.at("title").get<std::string>();
  doc.pages.clear();
  for (const auto& p : j.at("pages")) {
    doc.pages.push_back({p.at("number").get<int>(), p.at("image").get<PageImage>()});
  }
  doc.assets.clear();
  for (const auto& a : j.at("assets")) {
    VisualAsset asset;
    asset.id = a.at("id").get<std::string>();
    asset.kind = a.at("kind").get<std::string>() == "table" ? AssetKind::Table : AssetKind::Figure;
    asset.page = a.at("page").get<int>();
    asset.image = a.at("image").get<PageImage>();
    if (a.contains("caption") && !a["caption"].is_null()) asset.caption = a["caption"].get<std::string>();
    if (a.contains("summary") && !a["summary"].is_null()) {
      asset.summary = Summary{a["summary"].at("text").get<std::string>(),
                              a["summary"].at("token_count").get<std::size_t>()};
    }
    doc.assets.push_back(std::move(asset));
  }
  doc.elements.clear();
  for (const auto& e : j.at("elements")) {
    const auto kind = parse_element_kind(e.at("kind").get<std::string>());
    if (!kind) throw SchemaError("unknown element kind");
    doc.elements.push_back({*kind, e.at("text").get<std::string>(), e.at("page").get<int>()});
  }
}

void to_json(nlohmann::json& j, const Chunk& c) {
  j = nlohmann::json{{"id", c.id},     {"doc_id", c.doc_id}, {"kind", to_string(c.element_kind)},
                     {"text", c.text}, {"page", c.page},     {"token_count", c.token_count}};
}

void from_json(const nlohmann::json& j, Chunk& c) {
  c.id = j.at("id").get<std::string>();
  c.doc_id = j.at("doc_id").get<std::string>();
  const auto kind = parse_element_kind(j.at("kind").get<std::string>());
  if (!kind) throw SchemaError("unknown chunk element kind");
  c.element_kind = *kind;
  c.text = j.at("text").get<std::string>();
  c.page = j.at("page").get<int>();
  c.token_count = j.at("token_count").get<std::size_t>();
}

}  // namespace mmrag::corpus
