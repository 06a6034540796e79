#include "mmrag/corpus/tokenizer.hpp"

#include <cctype>

namespace mmrag::corpus {

namespace {

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c == '_' || c >= 0x80;
}

}  // namespace

std::string_view Tokenizer::truncate(std::string_view text, std::size_t max_tokens) const {
  const auto toks = spans(text);
  if (toks.size() <= max_tokens) return text;
  if (max_tokens == 0) return text.substr(0, 0);
  return text.substr(0, toks[max_tokens - 1].end);
}

std::vector<TokenSpan> ApproxTokenizer::spans(std::string_view text) const {
  std::vector<TokenSpan> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c) != 0) {
      ++i;
    } else if (is_word_byte(c)) {
      const std::size_t begin = i;
      while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back({begin, i});
    } else {
      out.push_back({i, i + 1});
      ++i;
    }
  }
  return out;
}

const Tokenizer& default_tokenizer() {
  static const ApproxTokenizer tokenizer;
  return tokenizer;
}

}  // namespace mmrag::corpus
