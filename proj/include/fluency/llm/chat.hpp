#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "fluency/net/http_post.hpp"

namespace fluency::llm {

enum class ChatRole { System, Human };

struct ChatMessage {
  ChatRole role = ChatRole::Human;
  std::string content;
};

/// Which agent is speaking. Travels with a request for routing and
/// scripting; never sent over the wire.
enum class AgentTag { Therapy, Critic, Refine, HumanRevision };

std::string_view to_string(AgentTag tag);

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  AgentTag tag = AgentTag::Therapy;
  int round = 0;           // loop round; 0 for the initial generation
  std::string session_id;  // scopes mock state
};

/// Throws Error(InvalidInput) unless the first message is a system message,
/// every message is non-empty and T is within [0, 2].
void check_request(const ChatRequest& request);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// Validates the request, delegates, and rejects blank output with
/// Error(ResponseEmpty).
std::string complete(const ChatRequest& request, ChatBackend& backend);

// -- scripted mock -----------------------------------------------------------

struct ScriptVariant {
  std::string text;
  double weight = 1.0;
};

/// Deterministic stand-in for a model. Responses are looked up by
/// (tag, round):
///  - a sequence returns its k-th entry on the k-th call for that key
///    (the last entry repeats), which scripts parse failures and retries;
///  - a variant set is sampled with softmax_temperature over log(weight) at
///    the request temperature, using an RNG keyed by (seed, session, tag,
///    round, call number). T = 0 always yields the heaviest variant.
/// Unscripted keys fall back to the built-in responses (a valid therapy plan
/// for plan-producing agents, a six-domain review for the critic).
class ScriptedChatBackend final : public ChatBackend {
 public:
  explicit ScriptedChatBackend(std::uint64_t seed = 0) : seed_(seed) {}

  ScriptedChatBackend& script(AgentTag tag, int round, std::string text);
  ScriptedChatBackend& script_sequence(AgentTag tag, int round,
                                       std::vector<std::string> texts);
  ScriptedChatBackend& script_variants(AgentTag tag, int round,
                                       std::vector<ScriptVariant> variants);
  /// Replaces the built-in fallback for every unscripted key of a tag.
  ScriptedChatBackend& script_default(AgentTag tag, std::string text);

  std::string complete(const ChatRequest& request) override;

  long calls() const { return calls_.load(); }
  std::vector<ChatRequest> requests() const;

 private:
  struct Entry {
    std::vector<std::string> sequence;
    std::vector<ScriptVariant> variants;
  };

  std::uint64_t seed_;
  mutable std::mutex mutex_;
  std::map<std::pair<AgentTag, int>, Entry> entries_;
  std::map<AgentTag, std::string> defaults_;
  std::map<std::tuple<std::string, AgentTag, int>, int> call_counts_;
  std::vector<ChatRequest> log_;
  std::atomic<long> calls_{0};
};

/// Built-in responses of the scripted backend.
std::string builtin_plan_response(AgentTag tag, int round);
std::string builtin_critic_response(int round);

// -- remote ------------------------------------------------------------------

struct RemoteChatConfig {
  std::string endpoint;  // base URL or full .../chat/completions URL
  std::string model;
  std::string api_key;
  double timeout_s = 120.0;
  int max_tokens = 8192;
  net::RetryPolicy retry{};
};

/// OpenAI-style chat-completions client: system/human map to the
/// "system"/"user" roles, the reply is choices[0].message.content.
class RemoteChatBackend final : public ChatBackend {
 public:
  explicit RemoteChatBackend(RemoteChatConfig config);
  std::string complete(const ChatRequest& request) override;

 private:
  RemoteChatConfig config_;
  std::string url_;
};

}  // namespace fluency::llm
