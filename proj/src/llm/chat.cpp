#include "fluency/llm/chat.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include "fluency/core/error.hpp"
#include "fluency/core/plan.hpp"
#include "fluency/core/serialize.hpp"
#include "fluency/llm/softmax.hpp"

namespace fluency::llm {

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t sampling_key(std::uint64_t seed, const ChatRequest& request,
                           int call) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  h = fnv1a(h, request.session_id);
  h = fnv1a(h, to_string(request.tag));
  h = fnv1a(h, std::to_string(request.round));
  return fnv1a(h, std::to_string(call));
}

}  // namespace

std::string_view to_string(AgentTag tag) {
  switch (tag) {
    case AgentTag::Therapy: return "therapy";
    case AgentTag::Critic: return "critic";
    case AgentTag::Refine: return "refine";
    case AgentTag::HumanRevision: return "human_revision";
  }
  return "therapy";
}

void check_request(const ChatRequest& request) {
  if (request.messages.empty() ||
      request.messages.front().role != ChatRole::System) {
    throw Error(ErrorCode::InvalidInput, "first message must be a system message");
  }
  for (const auto& m : request.messages) {
    if (blank(m.content)) throw Error(ErrorCode::InvalidInput, "empty message");
  }
  if (!(request.temperature >= 0.0 && request.temperature <= 2.0)) {
    throw Error(ErrorCode::InvalidInput, "temperature outside [0, 2]");
  }
}

std::string complete(const ChatRequest& request, ChatBackend& backend) {
  check_request(request);
  std::string out = backend.complete(request);
  if (blank(out)) throw Error(ErrorCode::ResponseEmpty, std::string(to_string(request.tag)));
  return out;
}

// -- scripted -----------------------------------------------------------------

ScriptedChatBackend& ScriptedChatBackend::script(AgentTag tag, int round,
                                                 std::string text) {
  return script_sequence(tag, round, {std::move(text)});
}

ScriptedChatBackend& ScriptedChatBackend::script_sequence(
    AgentTag tag, int round, std::vector<std::string> texts) {
  std::lock_guard lock(mutex_);
  entries_[{tag, round}] = Entry{std::move(texts), {}};
  return *this;
}

ScriptedChatBackend& ScriptedChatBackend::script_variants(
    AgentTag tag, int round, std::vector<ScriptVariant> variants) {
  for (const auto& v : variants) {
    if (!(v.weight > 0.0) || !std::isfinite(v.weight)) {
      throw Error(ErrorCode::InvalidInput, "variant weight must be positive");
    }
  }
  std::lock_guard lock(mutex_);
  entries_[{tag, round}] = Entry{{}, std::move(variants)};
  return *this;
}

ScriptedChatBackend& ScriptedChatBackend::script_default(AgentTag tag,
                                                         std::string text) {
  std::lock_guard lock(mutex_);
  defaults_[tag] = std::move(text);
  return *this;
}

std::vector<ChatRequest> ScriptedChatBackend::requests() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::string ScriptedChatBackend::complete(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  ++calls_;
  log_.push_back(request);
  const int call = call_counts_[{request.session_id, request.tag, request.round}]++;

  auto it = entries_.find({request.tag, request.round});
  if (it != entries_.end()) {
    const Entry& entry = it->second;
    if (!entry.sequence.empty()) {
      const auto k = std::min<std::size_t>(call, entry.sequence.size() - 1);
      return entry.sequence[k];
    }
    if (!entry.variants.empty()) {
      std::vector<double> logits;
      for (const auto& v : entry.variants) logits.push_back(std::log(v.weight));
      auto probs = softmax_temperature(logits, request.temperature);
      if (request.temperature == 0.0) {
        // Argmax limit; ties resolve to the earliest variant.
        auto top = std::max_element(probs.begin(), probs.end()) - probs.begin();
        return entry.variants[top].text;
      }
      std::mt19937_64 rng(sampling_key(seed_, request, call));
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      double acc = 0.0;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return entry.variants[i].text;
      }
      return entry.variants.back().text;
    }
  }
  if (auto d = defaults_.find(request.tag); d != defaults_.end()) return d->second;
  if (request.tag == AgentTag::Critic) return builtin_critic_response(request.round);
  return builtin_plan_response(request.tag, request.round);
}

std::string builtin_plan_response(AgentTag tag, int round) {
  auto reasoning = [](std::string obs, std::string why, std::string outcome,
                      std::string evidence) {
    return ClinicalReasoning{std::move(obs), std::move(why), std::move(outcome),
                             std::move(evidence)};
  };
  TherapyPlan plan;
  plan.explanation.stuttering_type_definition =
      "A block is a stoppage of airflow or voicing at the onset of a sound, "
      "often with visible tension.";
  plan.explanation.patient_characteristics =
      "Recorded speech shows repeated onset blocks on plosives and moderate "
      "avoidance in conversation.";
  plan.explanation.therapeutic_rationale =
      "Fluency shaping builds relaxed onsets first; stuttering modification "
      "then gives the speaker tools for the blocks that remain. IMPORTANT "
      "LIMITATION: this plan was drafted from a short recording and must be "
      "confirmed by a licensed clinician.";
  plan.primary_goal = {"Reduce the frequency and duration of blocks in conversation",
                       "Fewer than 3% stuttered syllables in a 10-minute conversation",
                       "Blocks observed in roughly one in three chunks",
                       "Blocks are the dominant disfluency in the recording"};
  plan.steps.push_back(PlanStep{
      "Easy onsets", "Weeks 1-4", "Establish gentle voicing at word onsets",
      {Strategy{"Gentle onset drills",
                "Start words with a slow, breathy release of air.",
                "Practise 20 single words daily, then short phrases.",
                reasoning("Blocks cluster on word-initial plosives.",
                          "Soft onsets reduce laryngeal tension at initiation.",
                          "Shorter and less frequent onset blocks.",
                          "Fluency shaping literature on gentle onsets.")}}});
  plan.steps.push_back(PlanStep{
      "Block management", "Weeks 5-8", "Release blocks with pull-outs",
      {Strategy{"Pull-outs",
                "Ease out of a block mid-word instead of forcing through.",
                "Model the pull-out, then practise in reading and conversation.",
                reasoning("Residual blocks remain after onset practice.",
                          "Controlled release replaces struggle behaviour.",
                          "Reduced tension and secondary behaviours.",
                          "Stuttering modification approaches (Van Riper).")}}});
  if (round > 0) {
    plan.steps.back().objective +=
        " (revision " + std::to_string(round) + ", " +
        std::string(to_string(tag)) + ")";
  }
  return plan_json_text(plan);
}

std::string builtin_critic_response(int round) {
  std::string out = "Review round " + std::to_string(round) + "\n\n";
  for (auto domain : kAllCriticDomains) {
    out += "- " + std::string(heading(domain)) + ":\n";
    out += "  - Observation: The plan addresses the dominant disfluency.\n";
    out += "  - Strengths: Steps are ordered and time-bound.\n";
    out += "  - Concerns: Carry-over into daily conversation is thin.\n";
    out += "  - Recommendations: Add a transfer activity to the final step.\n";
  }
  return out;
}

// -- remote -------------------------------------------------------------------

RemoteChatBackend::RemoteChatBackend(RemoteChatConfig config)
    : config_(std::move(config)) {
  url_ = config_.endpoint;
  while (!url_.empty() && url_.back() == '/') url_.pop_back();
  const std::string suffix = "/chat/completions";
  if (url_.size() < suffix.size() ||
      url_.compare(url_.size() - suffix.size(), suffix.size(), suffix) != 0) {
    url_ += suffix;
  }
}

std::string RemoteChatBackend::complete(const ChatRequest& request) {
  Json messages = Json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role == ChatRole::System ? "system" : "user"},
                        {"content", m.content}});
  }
  Json body = {{"messages", std::move(messages)},
               {"temperature", request.temperature},
               {"max_tokens", config_.max_tokens}};
  if (!config_.model.empty()) body["model"] = config_.model;

  Json reply = net::post_json({url_, config_.api_key, config_.timeout_s}, body,
                              config_.retry);
  const Json* content = nullptr;
  if (reply.contains("choices") && reply["choices"].is_array() &&
      !reply["choices"].empty()) {
    const Json& choice = reply["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content")) {
      content = &choice["message"]["content"];
    }
  }
  if (content == nullptr) {
    throw Error(ErrorCode::BackendUnavailable,
                "bad response: missing choices[0].message.content");
  }
  if (content->is_null()) return {};
  if (!content->is_string()) {
    throw Error(ErrorCode::BackendUnavailable, "bad response: content is not text");
  }
  return content->get<std::string>();
}

}  // namespace fluency::llm
