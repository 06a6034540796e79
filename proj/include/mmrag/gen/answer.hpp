#pragma once

#include <optional>
#include <string_view>

#include "mmrag/corpus/types.hpp"

namespace mmrag::gen {

/// Reads the chosen letter from a model response. Precedence:
///   1. the whole trimmed text is a JSON object whose "query_answer" is "A".."D";
///   2. a `query_answer` key followed by a letter anywhere in the text;
///   3. the trimmed text is a single capital letter A-D.
/// Returns nullopt (a parse failure) otherwise. Never throws.
std::optional<corpus::Letter> extract_answer(std::string_view raw) noexcept;

}  // namespace mmrag::gen
