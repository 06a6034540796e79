#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mmrag::corpus {

enum class Difficulty { Easy, Medium, Hard };

inline constexpr std::array<Difficulty, 3> kDifficulties = {Difficulty::Easy, Difficulty::Medium,
                                                            Difficulty::Hard};

std::string_view to_string(Difficulty d) noexcept;
std::optional<Difficulty> parse_difficulty(std::string_view s) noexcept;

/// One of the four MCQ option letters.
enum class Letter : std::uint8_t { A = 0, B = 1, C = 2, D = 3 };

inline constexpr std::size_t kOptionCount = 4;

constexpr char to_char(Letter l) noexcept { return static_cast<char>('A' + static_cast<int>(l)); }
constexpr std::size_t index_of(Letter l) noexcept { return static_cast<std::size_t>(l); }
constexpr Letter letter_at(std::size_t i) noexcept { return static_cast<Letter>(i); }
std::optional<Letter> parse_letter(std::string_view s) noexcept;

/// Display order of the options: slot i shows original option `slots[i]`.
class OptionOrder {
 public:
  constexpr OptionOrder() noexcept : slots_{0, 1, 2, 3} {}
  /// Throws PreconditionError unless `slots` is a permutation of {0,1,2,3}.
  explicit OptionOrder(std::array<std::uint8_t, kOptionCount> slots);

  static constexpr OptionOrder identity() noexcept { return {}; }
  /// All 24 orders in lexicographic order.
  static std::vector<OptionOrder> all();

  std::size_t original_at(std::size_t slot) const noexcept { return slots_[slot]; }
  /// Letter under which the original option `original` is displayed.
  Letter displayed_letter(Letter original) const noexcept;
  OptionOrder inverse() const noexcept;
  bool is_identity() const noexcept { return *this == identity(); }
  const std::array<std::uint8_t, kOptionCount>& slots() const noexcept { return slots_; }

  friend bool operator==(const OptionOrder&, const OptionOrder&) = default;

 private:
  std::array<std::uint8_t, kOptionCount> slots_;
};

/// One multiple-choice question. Use `validate_item` before trusting a hand-built value;
/// `load_benchmark` only returns valid items.
struct BenchmarkItem {
  std::string id;
  std::string question;
  std::vector<std::string> options;
  char gold = 'A';
  Difficulty difficulty = Difficulty::Easy;
  std::string source_doc;
  /// Optional per-item relevance annotation (1-based page numbers of `source_doc`).
  std::vector<int> gold_pages;

  Letter gold_letter() const;

  friend bool operator==(const BenchmarkItem&, const BenchmarkItem&) = default;
};

/// Every violated item invariant; empty when valid.
std::vector<std::string> validate_item(const BenchmarkItem& item);

enum class ElementKind { Heading, Paragraph, Caption, Table, Figure };

std::string_view to_string(ElementKind k) noexcept;
std::optional<ElementKind> parse_element_kind(std::string_view s) noexcept;

struct TextElement {
  ElementKind kind = ElementKind::Paragraph;
  std::string text;
  int page = 1;

  friend bool operator==(const TextElement&, const TextElement&) = default;
};

enum class ImageEncoding { Png, Jpeg };

std::string_view to_string(ImageEncoding e) noexcept;
std::string_view mime_type(ImageEncoding e) noexcept;

struct PageImage {
  int width_px = 0;
  int height_px = 0;
  std::string bytes;  // encoded raster
  ImageEncoding encoding = ImageEncoding::Png;

  int long_side() const noexcept { return width_px > height_px ? width_px : height_px; }

  friend bool operator==(const PageImage&, const PageImage&) = default;
};

struct Page {
  int number = 1;
  PageImage image;

  friend bool operator==(const Page&, const Page&) = default;
};

enum class AssetKind { Table, Figure };

std::string_view to_string(AssetKind k) noexcept;

struct Summary {
  std::string text;
  std::size_t token_count = 0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

inline constexpr std::size_t kSummaryTokenCap = 250;

struct VisualAsset {
  std::string id;
  AssetKind kind = AssetKind::Table;
  int page = 1;
  PageImage image;
  std::optional<std::string> caption;
  std::optional<Summary> summary;

  friend bool operator==(const VisualAsset&, const VisualAsset&) = default;
};

struct SourceDocument {
  std::string id;
  std::string title;
  std::vector<Page> pages;
  std::vector<VisualAsset> assets;
  std::vector<TextElement> elements;

  friend bool operator==(const SourceDocument&, const SourceDocument&) = default;
};

/// Page-number contiguity and asset page references.
std::vector<std::string> validate_document(const SourceDocument& doc);

/// "doc_id#page_no", the key of a page in late-interaction collections.
std::string page_key(std::string_view doc_id, int page);

struct Chunk {
  std::string id;
  std::string doc_id;
  ElementKind element_kind = ElementKind::Paragraph;
  std::string text;
  int page = 1;
  std::size_t token_count = 0;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

inline constexpr std::size_t kDefaultTokenBudget = 16000;

void to_json(nlohmann::json& j, const BenchmarkItem& item);
void to_json(nlohmann::json& j, const PageImage& img);
void from_json(const nlohmann::json& j, PageImage& img);
void to_json(nlohmann::json& j, const SourceDocument& doc);
void from_json(const nlohmann::json& j, SourceDocument& doc);
void to_json(nlohmann::json& j, const Chunk& c);
void from_json(const nlohmann::json& j, Chunk& c);

}  // namespace mmrag::corpus
