#include "http_util.hpp"

#include <fmt/format.h>

#include "mmrag/errors.hpp"
#include "mmrag/util.hpp"

namespace mmrag::detail {

UrlParts split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw ConfigError(fmt::format("endpoint URL '{}' has no scheme", redact_url(url)));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  UrlParts parts;
  if (path_start == std::string_view::npos) {
    parts.origin = std::string(url);
  } else {
    parts.origin = std::string(url.substr(0, path_start));
    parts.prefix = std::string(url.substr(path_start));
    while (!parts.prefix.empty() && parts.prefix.back() == '/') parts.prefix.pop_back();
  }
  // Query strings on a base URL are not forwarded.
  if (const auto q = parts.prefix.find('?'); q != std::string::npos) parts.prefix.resize(q);
  return parts;
}

std::unique_ptr<httplib::Client> make_client(const UrlParts& url, double timeout_s) {
  auto client = std::make_unique<httplib::Client>(url.origin);
  const auto secs = static_cast<time_t>(timeout_s);
  const auto usecs = static_cast<time_t>((timeout_s - static_cast<double>(secs)) * 1e6);
  client->set_connection_timeout(secs, usecs);
  client->set_read_timeout(secs, usecs);
  client->set_write_timeout(secs, usecs);
  return client;
}

std::string excerpt(std::string_view body, std::size_t n) {
  if (body.size() <= n) return std::string(body);
  return std::string(body.substr(0, n)) + "...";
}

void check_result(const httplib::Result& res, std::string_view what, std::string_view url) {
  const auto where = redact_url(url);
  if (!res) {
    throw TransportError(fmt::format("{} at {} failed: {}", what, where, httplib::to_string(res.error())), 0);
  }
  const int status = res->status;
  if (status == 401 || status == 403) {
    throw AuthError(fmt::format("{} at {}: authentication failed (HTTP {})", what, where, status), status);
  }
  if (status < 200 || status >= 300) {
    throw TransportError(
        fmt::format("{} at {}: HTTP {}: {}", what, where, status, excerpt(res->body)), status);
  }
}

}  // namespace mmrag::detail
