#pragma once

#include <chrono>
#include <string>

#include <nlohmann/json.hpp>

namespace fluency::net {

struct Endpoint {
  std::string url;      // scheme://host[:port]/path
  std::string api_key;  // sent as "Authorization: Bearer <key>" when set
  double timeout_s = 30.0;
};

struct RetryPolicy {
  int max_retries = 2;
  std::chrono::milliseconds base_delay{200};
};

/// POSTs a JSON body and returns the decoded JSON response. Transport
/// failures, 429 and 5xx are retried with exponential backoff
/// (base_delay * 2^attempt). Failures end in Error(BackendUnavailable) with a
/// detail beginning "auth", "network", "http <status>" or "bad response".
/// 401/403 are not retried.
nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body,
                         const RetryPolicy& retry = {});

std::string base64_encode(std::string_view bytes);

}  // namespace fluency::net
