#pragma once

// Thin blocking HTTP client over cpp-httplib. Kept out of the public headers
// so only a couple of translation units pay for httplib.h.

#include <chrono>
#include <map>
#include <string>
#include <string_view>

namespace restcheck::net {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;    // begins with '/', may be just "/"
};

/// Splits an absolute http(s) URL. Throws std::invalid_argument otherwise.
UrlParts split_url(std::string_view url);

bool is_http_url(std::string_view text) noexcept;

enum class Failure { none, connect, timeout, other };

struct HttpResult {
  Failure failure = Failure::none;
  int status = 0;
  std::string body;
  std::string error;  // transport error text when failure != none
};

HttpResult request(std::string_view method, std::string_view url,
                   const std::string& body,
                   const std::map<std::string, std::string>& headers,
                   std::chrono::milliseconds timeout);

}  // namespace restcheck::net
