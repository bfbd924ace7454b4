#pragma once

// Kept out of the other headers: httplib is large and pulls in OpenSSL.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

#include "chat.hpp"

namespace coopsim::llm {

struct EndpointUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

inline EndpointUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("endpoint URL must be http or https: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport : public HttpTransport {
 public:
  HttplibTransport(const std::string& endpoint, std::string api_key, int timeout_seconds = 60)
      : url_(split_url(endpoint)), api_key_(std::move(api_key)), timeout_(timeout_seconds) {}

  HttpResult post_json(const std::string& body) override {
    httplib::Client client(url_.base);
    client.set_connection_timeout(timeout_, 0);
    client.set_read_timeout(timeout_, 0);
    client.set_write_timeout(timeout_, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = client.Post(url_.path, headers, body, "application/json");
    if (!res) return {0, {}, httplib::to_string(res.error())};
    return {res->status, res->body, {}};
  }

 private:
  EndpointUrl url_;
  std::string api_key_;
  int timeout_;
};

}  // namespace coopsim::llm
