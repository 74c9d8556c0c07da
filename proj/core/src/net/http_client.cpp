#include "net/http_client.hpp"

#include <stdexcept>

#include "httplib.h"

namespace restcheck::net {

bool is_http_url(std::string_view text) noexcept {
  return text.starts_with("http://") || text.starts_with("https://");
}

UrlParts split_url(std::string_view url) {
  if (!is_http_url(url)) {
    throw std::invalid_argument("not an http(s) url: " + std::string(url));
  }
  auto scheme_end = url.find("://") + 3;
  auto path_start = url.find('/', scheme_end);
  UrlParts parts;
  if (path_start == std::string_view::npos) {
    parts.origin = std::string(url);
    parts.path = "/";
  } else {
    parts.origin = std::string(url.substr(0, path_start));
    parts.path = std::string(url.substr(path_start));
  }
  return parts;
}

HttpResult request(std::string_view method, std::string_view url,
                   const std::string& body,
                   const std::map<std::string, std::string>& headers,
                   std::chrono::milliseconds timeout) {
  HttpResult out;
  UrlParts parts;
  try {
    parts = split_url(url);
  } catch (const std::invalid_argument& e) {
    out.failure = Failure::other;
    out.error = e.what();
    return out;
  }

  httplib::Client client(parts.origin);
  client.set_follow_location(true);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers hdrs;
  std::string content_type = "application/json";
  for (const auto& [k, v] : headers) {
    if (k == "Content-Type") {
      content_type = v;
    } else {
      hdrs.emplace(k, v);
    }
  }

  httplib::Result res{nullptr, httplib::Error::Unknown};
  if (method == "GET") {
    res = client.Get(parts.path, hdrs);
  } else if (method == "POST") {
    res = client.Post(parts.path, hdrs, body, content_type);
  } else {
    out.failure = Failure::other;
    out.error = "unsupported method " + std::string(method);
    return out;
  }

  if (!res) {
    auto err = res.error();
    out.error = httplib::to_string(err);
    switch (err) {
      case httplib::Error::Connection:
        out.failure = Failure::connect;
        break;
      case httplib::Error::Read:
      case httplib::Error::Write:
      case httplib::Error::ConnectionTimeout:
        out.failure = Failure::timeout;
        break;
      default:
        out.failure = Failure::other;
        break;
    }
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

}  // namespace restcheck::net
