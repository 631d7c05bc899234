#include "fluency/orchestrator/loop.hpp"

#include <algorithm>
#include <cctype>

#include "fluency/core/serialize.hpp"

namespace fluency::orchestrator {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_fence(std::string_view raw) {
  std::string_view s = trim(raw);
  if (s.substr(0, 3) != "```") return s;
  auto newline = s.find('\n');
  if (newline == std::string_view::npos) return s;
  s.remove_prefix(newline + 1);
  s = trim(s);
  if (s.size() >= 3 && s.substr(s.size() - 3) == "```") s.remove_suffix(3);
  return trim(s);
}

std::string describe(const Violation& v) {
  std::string out = v.path + " " + std::string(to_string(v.reason));
  if (!v.detail.empty()) out += " (" + v.detail + ")";
  return out;
}

const prompt::TemplateSet& templates_of(const LoopOptions& options) {
  return options.templates ? *options.templates : prompt::TemplateSet::builtin();
}

struct Turn {
  llm::AgentTag tag;
  GenerationRole role;
  int round;  // request key round
  double temperature;
  prompt::RenderedPrompt prompt;
};

class Recorder {
 public:
  Recorder(llm::ChatBackend& backend, const LoopOptions& options, int first_round)
      : backend_(backend), options_(options), next_round_(first_round) {}

  std::string ask(const Turn& turn, std::string_view human_suffix = {}) {
    llm::ChatRequest request;
    request.messages = {{llm::ChatRole::System, turn.prompt.system},
                        {llm::ChatRole::Human, turn.prompt.human + std::string(human_suffix)}};
    request.temperature = turn.temperature;
    request.tag = turn.tag;
    request.round = turn.round;
    request.session_id = options_.session_id;

    GenerationRecord record;
    record.round = next_round_++;
    record.role = turn.role;
    record.prompt_system = request.messages[0].content;
    record.prompt_human = request.messages[1].content;
    try {
      record.raw_output = llm::complete(request, backend_);
    } catch (const Error& e) {
      record.parse_error = std::string(to_string(e.code())) + ": " + e.detail();
      history.push_back(std::move(record));
      throw;
    }
    history.push_back(record);
    return record.raw_output;
  }

  // Plan-producing turn with re-prompts carrying the previous parse error.
  std::optional<TherapyPlan> ask_plan(const Turn& turn, int retries) {
    std::string suffix;
    for (int attempt = 0; attempt <= retries; ++attempt) {
      std::string raw = ask(turn, suffix);
      try {
        TherapyPlan plan = parse_plan_output(raw);
        history.back().parsed_ok = true;
        return plan;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ParseFailure) throw;
        history.back().parse_error = e.detail();
        suffix = "\n\nYOUR PREVIOUS OUTPUT COULD NOT BE USED (" + e.detail() +
                 "). Output ONLY the corrected JSON object.";
      }
    }
    return std::nullopt;
  }

  void progress(LoopStage stage, int round) const {
    if (options_.on_progress) options_.on_progress(stage, round);
  }

  std::vector<GenerationRecord> history;

 private:
  llm::ChatBackend& backend_;
  const LoopOptions& options_;
  int next_round_;
};

}  // namespace

void OrchestrationConfig::check() const {
  if (rounds < 0 || rounds > kMaxRounds) {
    throw Error(ErrorCode::BadConfig, "rounds=" + std::to_string(rounds));
  }
  auto bad_t = [](double t) { return !(t >= 0.0 && t <= 2.0); };
  if (bad_t(therapy_temperature) || bad_t(critic_temperature)) {
    throw Error(ErrorCode::BadConfig, "temperature outside [0, 2]");
  }
  if (parse_retries < 0) throw Error(ErrorCode::BadConfig, "parse_retries < 0");
}

std::string_view to_string(LoopStage stage) {
  switch (stage) {
    case LoopStage::Generating: return "generating";
    case LoopStage::Critiquing: return "critiquing";
    case LoopStage::Refining: return "refining";
  }
  return "generating";
}

namespace {

// The prompts name the reasoning object "clinicalReasoning"; the canonical
// key is clinical_reasoning.
void accept_camel_reasoning(Json& plan) {
  auto steps = plan.find("steps");
  if (steps == plan.end() || !steps->is_array()) return;
  for (auto& step : *steps) {
    if (!step.is_object()) continue;
    auto strategies = step.find("strategies");
    if (strategies == step.end() || !strategies->is_array()) continue;
    for (auto& s : *strategies) {
      if (s.is_object() && s.contains("clinicalReasoning") &&
          !s.contains("clinical_reasoning")) {
        s["clinical_reasoning"] = std::move(s["clinicalReasoning"]);
        s.erase("clinicalReasoning");
      }
    }
  }
}

}  // namespace

TherapyPlan parse_plan_output(std::string_view raw) {
  Json json = Json::parse(strip_fence(raw), nullptr, false);
  if (json.is_discarded()) {
    throw Error(ErrorCode::ParseFailure, "syntax: not a JSON document");
  }
  if (!json.is_object()) {
    throw Error(ErrorCode::ParseFailure, "syntax: top level is not an object");
  }
  accept_camel_reasoning(json);
  auto violations = validate_plan_json(json);
  if (!violations.empty()) {
    std::string detail = "schema: " + describe(violations.front());
    if (violations.size() > 1) {
      detail += " and " + std::to_string(violations.size() - 1) + " more";
    }
    throw Error(ErrorCode::ParseFailure, detail);
  }
  return json.get<TherapyPlan>();
}

LoopResult run_loop(const prompt::PromptContext& ctx, const OrchestrationConfig& config,
                    llm::ChatBackend& backend, const LoopOptions& options) {
  config.check();
  const auto& templates = templates_of(options);
  Recorder rec(backend, options, 0);
  LoopResult result;

  rec.progress(LoopStage::Generating, 0);
  auto initial = rec.ask_plan({llm::AgentTag::Therapy, GenerationRole::TherapyInitial, 0,
                               config.therapy_temperature,
                               prompt::render_therapy_prompt(ctx, templates)},
                              config.parse_retries);
  if (!initial) {
    throw GenerationError(ErrorCode::GenerationFailed,
                          "initial plan did not parse after " +
                              std::to_string(config.parse_retries) + " retries",
                          std::move(rec.history));
  }
  result.final_plan = std::move(*initial);

  for (int round = 1; round <= config.rounds; ++round) {
    rec.progress(LoopStage::Critiquing, round);
    std::string critique =
        rec.ask({llm::AgentTag::Critic, GenerationRole::Critic, round,
                 config.critic_temperature,
                 prompt::render_critic_prompt(result.final_plan, ctx, templates)});
    rec.history.back().parsed_ok = true;  // free text; nothing to parse
    result.critic_texts.push_back(critique);

    rec.progress(LoopStage::Refining, round);
    auto refined = rec.ask_plan(
        {llm::AgentTag::Refine, GenerationRole::Refine, round, config.therapy_temperature,
         prompt::render_refinement_prompt(result.final_plan, critique, ctx, templates)},
        config.parse_retries);
    if (!refined) {
      result.failed_round = round;
      break;
    }
    result.final_plan = std::move(*refined);
  }

  refresh_urgent_flag(result.final_plan);
  result.red_flag = result.final_plan.urgent_flag;
  result.history = std::move(rec.history);
  return result;
}

LoopResult apply_human_revision(const TherapyPlan& plan, std::string_view feedback,
                                const prompt::PromptContext& ctx,
                                const OrchestrationConfig& config,
                                llm::ChatBackend& backend, int first_round,
                                int revision, const LoopOptions& options) {
  config.check();
  const auto& templates = templates_of(options);
  auto rendered = prompt::render_human_revision_request(plan, feedback, ctx, templates);
  Recorder rec(backend, options, first_round);

  rec.progress(LoopStage::Refining, revision);
  auto revised = rec.ask_plan({llm::AgentTag::HumanRevision, GenerationRole::HumanRevision,
                               revision, config.therapy_temperature, std::move(rendered)},
                              config.parse_retries);
  if (!revised) {
    throw GenerationError(ErrorCode::RefinementFailed,
                          "human revision did not parse after " +
                              std::to_string(config.parse_retries) + " retries",
                          std::move(rec.history));
  }
  LoopResult result;
  result.final_plan = std::move(*revised);
  refresh_urgent_flag(result.final_plan);
  result.red_flag = result.final_plan.urgent_flag;
  result.history = std::move(rec.history);
  return result;
}

}  // namespace fluency::orchestrator
