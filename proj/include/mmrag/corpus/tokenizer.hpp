#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace mmrag::corpus {

/// Byte range [begin, end) of one token inside the tokenized text.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Token counting used for chunk budgets, summary cutoffs and prompt ceilings.
/// Exact model tokenizers can be plugged in by implementing `spans`.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::vector<TokenSpan> spans(std::string_view text) const = 0;

  std::size_t count(std::string_view text) const { return spans(text).size(); }

  /// Prefix of `text` holding at most `max_tokens` tokens. Trailing whitespace
  /// after the last kept token is dropped.
  std::string_view truncate(std::string_view text, std::size_t max_tokens) const;
};

/// Whitespace + punctuation approximation: each maximal run of word characters
/// (ASCII alphanumerics, '_' and any non-ASCII byte) is one token, every other
/// non-space character is a token of its own.
class ApproxTokenizer final : public Tokenizer {
 public:
  std::vector<TokenSpan> spans(std::string_view text) const override;
};

const Tokenizer& default_tokenizer();

}  // namespace mmrag::corpus
