#include "fluency/net/http_post.hpp"

#include <thread>

#include <httplib.h>

#include "fluency/core/error.hpp"

namespace fluency::net {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::BadConfig, "endpoint URL lacks a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body,
                         const RetryPolicy& retry) {
  const SplitUrl url = split_url(endpoint.url);
  httplib::Client client(url.origin);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(endpoint.timeout_s));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (!endpoint.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  }
  const std::string payload =
      body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);

  std::string last_error;
  for (int attempt = 0; attempt <= retry.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(retry.base_delay * (1 << (attempt - 1)));
    }
    auto res = client.Post(url.path, headers, payload, "application/json");
    if (!res) {
      last_error = "network: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw Error(ErrorCode::BackendUnavailable,
                  "auth: http " + std::to_string(res->status));
    }
    if (retryable(res->status)) {
      last_error = "http " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw Error(ErrorCode::BackendUnavailable,
                  "http " + std::to_string(res->status));
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::BackendUnavailable,
                  std::string("bad response: ") + e.what());
    }
  }
  throw Error(ErrorCode::BackendUnavailable,
              last_error + " after " + std::to_string(retry.max_retries) +
                  " retries");
}

std::string base64_encode(std::string_view bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const auto n = (static_cast<unsigned char>(bytes[i]) << 16) |
                   (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                   static_cast<unsigned char>(bytes[i + 2]);
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  if (i < bytes.size()) {
    unsigned n = static_cast<unsigned char>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) n |= static_cast<unsigned char>(bytes[i + 1]) << 8;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

}  // namespace fluency::net
