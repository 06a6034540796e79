#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mmrag {

/// Stable 64-bit FNV-1a; used wherever a platform-independent string hash is needed.
constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string base64_encode(std::string_view bytes);
/// Throws FormatError on malformed input.
std::string base64_decode(std::string_view text);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// Replaces the value of credential-looking query parameters with "***".
std::string redact_url(std::string_view url);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);

}  // namespace mmrag
