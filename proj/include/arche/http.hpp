#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>

#include "arche/errors.hpp"

namespace arche {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

/// Minimal POST-JSON transport, swappable so tests can count and fake
/// network traffic.
class Transport {
public:
  virtual ~Transport() = default;

  /// Throws TransportError when no response could be obtained at all.
  virtual HttpResponse post_json(const std::string& url, const HttpHeaders& headers,
                                 const std::string& body, std::chrono::milliseconds timeout) = 0;
};

class HttplibTransport final : public Transport {
public:
  HttpResponse post_json(const std::string& url, const HttpHeaders& headers,
                         const std::string& body, std::chrono::milliseconds timeout) override {
    auto [base, path] = split_url(url);
    httplib::Client client(base);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers hl;
    for (const auto& [k, v] : headers) hl.emplace(k, v);
    httplib::Result res = client.Post(path, hl, body, "application/json");
    if (!res) {
      throw TransportError("request to " + url + " failed: " + httplib::to_string(res.error()));
    }
    return HttpResponse{res->status, res->body};
  }

private:
  // "https://host:port/a/b" -> ("https://host:port", "/a/b")
  static std::pair<std::string, std::string> split_url(const std::string& url) {
    size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw TransportError("malformed url: " + url);
    size_t path_start = url.find('/', scheme + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
  }
};

inline std::shared_ptr<Transport> default_transport() {
  return std::make_shared<HttplibTransport>();
}

}  // namespace arche
