#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fluency/core/error.hpp"
#include "fluency/core/plan.hpp"
#include "fluency/llm/chat.hpp"
#include "fluency/prompt/render.hpp"

namespace fluency::orchestrator {

struct OrchestrationConfig {
  int rounds = 2;  // critic + refine rounds after the initial plan, 0..5
  double therapy_temperature = 0.3;
  double critic_temperature = 0.0;
  int parse_retries = 2;

  static constexpr int kMaxRounds = 5;

  /// Throws Error(BadConfig) for rounds outside [0, 5], temperatures outside
  /// [0, 2] or negative retries.
  void check() const;

  friend bool operator==(const OrchestrationConfig&,
                         const OrchestrationConfig&) = default;
};

/// Strips an optional ``` / ```json fence, parses JSON and validates it. A
/// strategy's "clinicalReasoning" key is accepted for clinical_reasoning.
/// Throws Error(ParseFailure) with detail "syntax: ..." or "schema: <path> ...".
TherapyPlan parse_plan_output(std::string_view raw);

struct LoopResult {
  TherapyPlan final_plan;
  std::vector<GenerationRecord> history;
  std::vector<std::string> critic_texts;
  bool red_flag = false;
  // Set when a refinement round never produced a valid plan; final_plan is
  // then the last plan that did.
  std::optional<int> failed_round;

  bool degraded() const { return failed_round.has_value(); }
};

/// Raised when the initial plan (or a human revision) never parses. Carries
/// the records of every attempt so callers can persist them.
class GenerationError : public Error {
 public:
  GenerationError(ErrorCode code, std::string detail,
                  std::vector<GenerationRecord> history)
      : Error(code, std::move(detail)), history_(std::move(history)) {}
  const std::vector<GenerationRecord>& history() const { return history_; }

 private:
  std::vector<GenerationRecord> history_;
};

enum class LoopStage { Generating, Critiquing, Refining };

std::string_view to_string(LoopStage stage);

/// Called before each agent turn with the stage and the 1-based loop round
/// (0 for the initial generation).
using ProgressFn = std::function<void(LoopStage stage, int round)>;

struct LoopOptions {
  std::string session_id;
  ProgressFn on_progress;
  const prompt::TemplateSet* templates = nullptr;  // builtin when null
};

/// Initial plan, then `rounds` critic/refine pairs. Records are numbered
/// consecutively from 0 in call order. Throws GenerationError(GenerationFailed)
/// when the initial plan fails to parse after parse_retries re-prompts.
LoopResult run_loop(const prompt::PromptContext& ctx, const OrchestrationConfig& config,
                    llm::ChatBackend& backend, const LoopOptions& options = {});

/// One revision turn driven by clinician feedback. `first_round` numbers the
/// new records so they continue an existing history; `revision` is the
/// 1-based revision ordinal used to key the request. Throws
/// Error(MissingContext) on blank feedback and GenerationError(RefinementFailed)
/// when no attempt parses.
LoopResult apply_human_revision(const TherapyPlan& plan, std::string_view feedback,
                                const prompt::PromptContext& ctx,
                                const OrchestrationConfig& config,
                                llm::ChatBackend& backend, int first_round,
                                int revision = 1, const LoopOptions& options = {});

}  // namespace fluency::orchestrator
