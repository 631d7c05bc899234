#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fluency/core/types.hpp"
#include "fluency/net/http_post.hpp"

namespace fluency::analysis {

// All backends are shared across sessions and must tolerate concurrent calls.

class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  /// Probability for each of the six labels.
  virtual LabelDistribution classify(const Chunk& chunk) = 0;
};

class TranscriberBackend {
 public:
  virtual ~TranscriberBackend() = default;
  virtual std::string transcribe(const Chunk& chunk) = 0;
};

class PhonemizerBackend {
 public:
  virtual ~PhonemizerBackend() = default;
  /// IPA symbols in utterance order.
  virtual std::vector<std::string> phonemize(const Chunk& chunk) = 0;
};

// -- deterministic mocks -----------------------------------------------------
//
// Outputs are a pure function of (seed, chunk samples): a keyed 64-bit hash
// seeds a splitmix64 stream. The classifier maps six stream draws u_i onto the
// simplex via p_i = -ln(u_i) / sum_j -ln(u_j), i.e. a uniform draw from the
// probability simplex.

class MockClassifier final : public ClassifierBackend {
 public:
  explicit MockClassifier(std::uint64_t seed) : seed_(seed) {}
  LabelDistribution classify(const Chunk& chunk) override;
  long calls() const { return calls_.load(); }

 private:
  std::uint64_t seed_;
  std::atomic<long> calls_{0};
};

class MockTranscriber final : public TranscriberBackend {
 public:
  explicit MockTranscriber(std::uint64_t seed) : seed_(seed) {}
  std::string transcribe(const Chunk& chunk) override;
  long calls() const { return calls_.load(); }

 private:
  std::uint64_t seed_;
  std::atomic<long> calls_{0};
};

class MockPhonemizer final : public PhonemizerBackend {
 public:
  explicit MockPhonemizer(std::uint64_t seed) : seed_(seed) {}
  std::vector<std::string> phonemize(const Chunk& chunk) override;
  long calls() const { return calls_.load(); }

 private:
  std::uint64_t seed_;
  std::atomic<long> calls_{0};
};

std::shared_ptr<MockClassifier> mock_classifier(std::uint64_t seed);

/// Keyed FNV-1a over the seed and the little-endian sample bytes.
std::uint64_t chunk_hash(std::uint64_t seed, const Chunk& chunk);

// -- remote clients ----------------------------------------------------------
//
// Request body: {"audio": <base64 PCM16LE>, "sample_rate": <hz>}.
// Classifier response: {"<Label>": p, ...} with all six labels, or the same
// map nested under "probabilities". Transcriber response: {"text": "..."}.
// Phonemizer response: {"phonemes": ["...", ...]}.

class RemoteClassifier final : public ClassifierBackend {
 public:
  RemoteClassifier(net::Endpoint endpoint, net::RetryPolicy retry = {})
      : endpoint_(std::move(endpoint)), retry_(retry) {}
  LabelDistribution classify(const Chunk& chunk) override;

 private:
  net::Endpoint endpoint_;
  net::RetryPolicy retry_;
};

class RemoteTranscriber final : public TranscriberBackend {
 public:
  RemoteTranscriber(net::Endpoint endpoint, net::RetryPolicy retry = {})
      : endpoint_(std::move(endpoint)), retry_(retry) {}
  std::string transcribe(const Chunk& chunk) override;

 private:
  net::Endpoint endpoint_;
  net::RetryPolicy retry_;
};

class RemotePhonemizer final : public PhonemizerBackend {
 public:
  RemotePhonemizer(net::Endpoint endpoint, net::RetryPolicy retry = {})
      : endpoint_(std::move(endpoint)), retry_(retry) {}
  std::vector<std::string> phonemize(const Chunk& chunk) override;

 private:
  net::Endpoint endpoint_;
  net::RetryPolicy retry_;
};

}  // namespace fluency::analysis
