#include "fluency/service/config.hpp"

#include <charconv>
#include <cstdlib>

#include "fluency/core/error.hpp"

namespace fluency::service {

namespace {

std::string get(const EnvLookup& lookup, const char* key) {
  const char* v = lookup(key);
  return v ? std::string(v) : std::string{};
}

template <typename T>
T number(const std::string& text, const char* key) {
  T value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw Error(ErrorCode::BadConfig, std::string(key) + "=" + text);
  }
  return value;
}

double seconds(const std::string& text, const char* key) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !(v > 0.0)) {
    throw Error(ErrorCode::BadConfig, std::string(key) + "=" + text);
  }
  return v;
}

std::optional<net::Endpoint> endpoint(const EnvLookup& lookup, const char* url_key,
                                      const char* key_key) {
  std::string url = get(lookup, url_key);
  if (url.empty()) return std::nullopt;
  return net::Endpoint{std::move(url), get(lookup, key_key), 30.0};
}

}  // namespace

EnvConfig config_from_env(const EnvLookup& lookup) {
  EnvConfig c;
  if (auto dir = get(lookup, "DATA_DIR"); !dir.empty()) c.data_dir = dir;
  if (auto bind = get(lookup, "BIND_ADDR"); !bind.empty()) {
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::BadConfig, "BIND_ADDR=" + bind);
    c.host = bind.substr(0, colon);
    c.port = number<int>(bind.substr(colon + 1), "BIND_ADDR");
  }
  if (auto rounds = get(lookup, "MAX_ROUNDS"); !rounds.empty()) {
    c.max_rounds = number<int>(rounds, "MAX_ROUNDS");
    if (c.max_rounds < 0 || c.max_rounds > orchestrator::OrchestrationConfig::kMaxRounds) {
      throw Error(ErrorCode::BadConfig, "MAX_ROUNDS=" + rounds);
    }
  }
  if (auto seed = get(lookup, "MOCK_SEED"); !seed.empty()) {
    c.mock_seed = number<std::uint64_t>(seed, "MOCK_SEED");
  }
  if (auto url = get(lookup, "LLM_ENDPOINT"); !url.empty()) {
    llm::RemoteChatConfig llm;
    llm.endpoint = url;
    llm.model = get(lookup, "LLM_MODEL");
    llm.api_key = get(lookup, "LLM_API_KEY");
    if (auto t = get(lookup, "LLM_TIMEOUT_S"); !t.empty()) {
      llm.timeout_s = seconds(t, "LLM_TIMEOUT_S");
    }
    c.llm = std::move(llm);
  }
  c.classifier = endpoint(lookup, "CLASSIFIER_ENDPOINT", "CLASSIFIER_API_KEY");
  c.asr = endpoint(lookup, "ASR_ENDPOINT", "ASR_API_KEY");
  c.phonemizer = endpoint(lookup, "PHONEMIZER_ENDPOINT", "PHONEMIZER_API_KEY");
  return c;
}

EnvConfig config_from_env() {
  return config_from_env([](const char* key) { return std::getenv(key); });
}

Backends make_backends(const EnvConfig& config) {
  Backends b = mock_backends(config.mock_seed);
  if (config.classifier) b.classifier = std::make_shared<analysis::RemoteClassifier>(*config.classifier);
  if (config.asr) b.transcriber = std::make_shared<analysis::RemoteTranscriber>(*config.asr);
  if (config.phonemizer) {
    b.phonemizer = std::make_shared<analysis::RemotePhonemizer>(*config.phonemizer);
  }
  if (config.llm) b.chat = std::make_shared<llm::RemoteChatBackend>(*config.llm);
  return b;
}

}  // namespace fluency::service
