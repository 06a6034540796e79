#include "mmrag/ingest/chunker.hpp"

#include <cctype>

#include <fmt/format.h>

#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

namespace mmrag::ingest {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

/// Start offsets of sentences: a run of terminators (. ! ?), optional closing quotes or
/// brackets, then whitespace; the next sentence starts after the whitespace.
std::vector<std::size_t> sentence_starts(std::string_view text) {
  std::vector<std::size_t> starts{0};
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '.' || text[i] == '!' || text[i] == '?') {
      std::size_t j = i + 1;
      while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
      while (j < text.size() && (text[j] == '"' || text[j] == '\'' || text[j] == ')' || text[j] == ']')) ++j;
      if (j < text.size() && is_space(text[j])) {
        while (j < text.size() && is_space(text[j])) ++j;
        if (j < text.size()) starts.push_back(j);
      }
      i = j;
    } else {
      ++i;
    }
  }
  return starts;
}

}  // namespace

std::vector<std::string> split_to_budget(std::string_view text, std::size_t budget,
                                         const corpus::Tokenizer& tokenizer) {
  if (budget < 1) throw PreconditionError("token budget must be >= 1");
  if (text.empty()) return {};
  if (tokenizer.count(text) <= budget) return {std::string(text)};

  auto starts = sentence_starts(text);
  starts.push_back(text.size());

  std::vector<std::string> pieces;
  std::size_t piece_begin = 0;
  std::size_t piece_tokens = 0;
  const auto flush = [&](std::size_t end) {
    if (end > piece_begin) pieces.emplace_back(text.substr(piece_begin, end - piece_begin));
    piece_begin = end;
    piece_tokens = 0;
  };

  for (std::size_t u = 0; u + 1 < starts.size(); ++u) {
    const std::size_t ub = starts[u];
    const std::size_t ue = starts[u + 1];
    const auto unit = text.substr(ub, ue - ub);
    const auto spans = tokenizer.spans(unit);
    const std::size_t n = spans.size();

    if (piece_tokens + n <= budget) {
      piece_tokens += n;
      continue;
    }
    if (n <= budget) {
      flush(ub);
      piece_tokens = n;
      continue;
    }
    // Sentence longer than the budget: close the open piece, cut the sentence between
    // tokens, and keep its tail open so following sentences can join it.
    flush(ub);
    std::size_t tok = 0;
    while (n - tok > budget) {
      tok += budget;
      flush(ub + spans[tok].begin);
    }
    piece_tokens = n - tok;
  }
  flush(text.size());
  return pieces;
}

std::vector<corpus::Chunk> chunk_document(const corpus::SourceDocument& doc, const IngestionConfig& cfg,
                                          const corpus::Tokenizer& tokenizer) {
  cfg.validate();
  std::vector<corpus::Chunk> chunks;
  for (std::size_t e = 0; e < doc.elements.size(); ++e) {
    const auto& el = doc.elements[e];
    if (trim(el.text).empty()) continue;
    const auto pieces = split_to_budget(el.text, cfg.token_budget, tokenizer);
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      corpus::Chunk c;
      c.id = pieces.size() == 1 ? fmt::format("{}:e{:04}", doc.id, e) : fmt::format("{}:e{:04}.{}", doc.id, e, p);
      c.doc_id = doc.id;
      c.element_kind = el.kind;
      c.text = pieces[p];
      c.page = el.page;
      c.token_count = tokenizer.count(c.text);
      chunks.push_back(std::move(c));
    }
  }
  return chunks;
}

}  // namespace mmrag::ingest
