#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "fluency/llm/chat.hpp"
#include "fluency/net/http_post.hpp"
#include "fluency/service/service.hpp"

namespace fluency::service {

/// Service settings read from the environment:
///   LLM_ENDPOINT, LLM_MODEL, LLM_API_KEY, LLM_TIMEOUT_S (default 120)
///   CLASSIFIER_ENDPOINT, CLASSIFIER_API_KEY
///   ASR_ENDPOINT, ASR_API_KEY
///   PHONEMIZER_ENDPOINT, PHONEMIZER_API_KEY
///   DATA_DIR (default ./data), BIND_ADDR (default 127.0.0.1:8080),
///   MAX_ROUNDS (default 5), MOCK_SEED (default 0)
/// Any backend without an endpoint falls back to its deterministic mock.
struct EnvConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "data";
  int max_rounds = 5;
  std::uint64_t mock_seed = 0;
  std::optional<llm::RemoteChatConfig> llm;
  std::optional<net::Endpoint> classifier;
  std::optional<net::Endpoint> asr;
  std::optional<net::Endpoint> phonemizer;
};

using EnvLookup = std::function<const char*(const char*)>;

/// Throws Error(BadConfig) for malformed numbers or addresses.
EnvConfig config_from_env(const EnvLookup& lookup);
EnvConfig config_from_env();

Backends make_backends(const EnvConfig& config);

}  // namespace fluency::service
