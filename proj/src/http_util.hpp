#pragma once

// Internal helpers shared by the HTTP clients. Not installed.

#include <memory>
#include <string>
#include <string_view>

#include <httplib.h>

namespace mmrag::detail {

/// "http://host:port/some/prefix" -> origin "http://host:port", prefix "/some/prefix".
struct UrlParts {
  std::string origin;
  std::string prefix;
};

UrlParts split_url(std::string_view url);

std::unique_ptr<httplib::Client> make_client(const UrlParts& url, double timeout_s);

/// First `n` bytes of a response body, for error messages.
std::string excerpt(std::string_view body, std::size_t n = 200);

/// Throws TransportError / AuthError for a failed or non-2xx result. `what` names the call;
/// `url` is redacted before it is embedded in the message.
void check_result(const httplib::Result& res, std::string_view what, std::string_view url);

}  // namespace mmrag::detail
