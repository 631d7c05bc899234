#include "fluency/analysis/backends.hpp"

#include <cmath>

#include "fluency/core/error.hpp"

namespace fluency::analysis {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

// Distinct salts keep the three mocks' streams independent for one chunk.
constexpr std::uint64_t kTranscriberSalt = 0x7472616e73637269ULL;
constexpr std::uint64_t kPhonemizerSalt = 0x70686f6e656d6573ULL;

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform on (0, 1].
  double unit() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

constexpr const char* kWords[] = {
    "she", "could", "buy", "a", "minimum", "we", "do", "not", "own",
    "freshness", "it's", "fine", "but", "sometimes", "I", "then", "talk",
    "pay", "can", "should", "go", "look", "at", "that", "supermarket"};

constexpr const char* kPhonemes[] = {"p", "b", "t", "d", "k", "ɡ", "s", "ʃ",
                                     "f", "θ", "m", "n", "l", "ɹ", "w", "aɪ",
                                     "i", "u", "ʊ", "ə"};

std::string encoded_pcm(const Chunk& chunk) {
  std::string raw;
  raw.reserve(chunk.samples.size() * 2);
  for (auto s : chunk.samples) {
    const auto u = static_cast<std::uint16_t>(s);
    raw.push_back(static_cast<char>(u & 0xFF));
    raw.push_back(static_cast<char>(u >> 8));
  }
  return net::base64_encode(raw);
}

nlohmann::json request_body(const Chunk& chunk) {
  return {{"audio", encoded_pcm(chunk)}, {"sample_rate", chunk.sample_rate_hz}};
}

}  // namespace

std::uint64_t chunk_hash(std::uint64_t seed, const Chunk& chunk) {
  std::uint64_t h = kFnvOffset;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= kFnvPrime;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<std::uint8_t>(seed >> (8 * i)));
  for (auto s : chunk.samples) {
    const auto u = static_cast<std::uint16_t>(s);
    mix(static_cast<std::uint8_t>(u & 0xFF));
    mix(static_cast<std::uint8_t>(u >> 8));
  }
  return h;
}

LabelDistribution MockClassifier::classify(const Chunk& chunk) {
  ++calls_;
  SplitMix64 rng(chunk_hash(seed_, chunk));
  std::array<double, kAllLabels.size()> weights{};
  double total = 0.0;
  for (auto& w : weights) {
    w = -std::log(rng.unit());
    total += w;
  }
  if (total <= 0.0) {  // every draw was exactly 1.0
    weights.fill(1.0);
    total = static_cast<double>(weights.size());
  }
  LabelDistribution out;
  for (std::size_t i = 0; i < kAllLabels.size(); ++i) {
    out[kAllLabels[i]] = weights[i] / total;
  }
  return out;
}

std::string MockTranscriber::transcribe(const Chunk& chunk) {
  ++calls_;
  SplitMix64 rng(chunk_hash(seed_ ^ kTranscriberSalt, chunk));
  const auto n = 3 + rng.next() % 4;
  std::string text;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (i) text += ' ';
    text += kWords[rng.next() % std::size(kWords)];
  }
  return text;
}

std::vector<std::string> MockPhonemizer::phonemize(const Chunk& chunk) {
  ++calls_;
  SplitMix64 rng(chunk_hash(seed_ ^ kPhonemizerSalt, chunk));
  const auto n = 4 + rng.next() % 5;
  std::vector<std::string> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    out.emplace_back(kPhonemes[rng.next() % std::size(kPhonemes)]);
  }
  return out;
}

std::shared_ptr<MockClassifier> mock_classifier(std::uint64_t seed) {
  return std::make_shared<MockClassifier>(seed);
}

LabelDistribution RemoteClassifier::classify(const Chunk& chunk) {
  const auto response = net::post_json(endpoint_, request_body(chunk), retry_);
  const auto& map = response.contains("probabilities")
                        ? response.at("probabilities")
                        : response;
  if (!map.is_object()) {
    throw Error(ErrorCode::BackendUnavailable,
                "schema mismatch: expected label->probability object");
  }
  LabelDistribution out;
  for (const auto& [key, value] : map.items()) {
    auto label = label_from_string(key);
    if (!label || !value.is_number()) {
      throw Error(ErrorCode::BackendUnavailable,
                  "schema mismatch: unexpected entry '" + key + "'");
    }
    out[*label] = value.get<double>();
  }
  // Label count and normalisation are checked by classify_all.
  return out;
}

std::string RemoteTranscriber::transcribe(const Chunk& chunk) {
  const auto response = net::post_json(endpoint_, request_body(chunk), retry_);
  auto it = response.find("text");
  if (it == response.end() || !it->is_string()) {
    throw Error(ErrorCode::BackendUnavailable, "schema mismatch: missing text");
  }
  return it->get<std::string>();
}

std::vector<std::string> RemotePhonemizer::phonemize(const Chunk& chunk) {
  const auto response = net::post_json(endpoint_, request_body(chunk), retry_);
  auto it = response.find("phonemes");
  if (it == response.end() || !it->is_array()) {
    throw Error(ErrorCode::BackendUnavailable,
                "schema mismatch: missing phonemes");
  }
  return it->get<std::vector<std::string>>();
}

}  // namespace fluency::analysis
