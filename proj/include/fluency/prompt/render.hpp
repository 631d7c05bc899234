#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fluency/core/plan.hpp"
#include "fluency/core/types.hpp"
#include "fluency/prompt/templates.hpp"

namespace fluency::prompt {

struct PromptContext {
  PatientProfile patient;
  std::optional<OverallClassification> classification;
  // Empty means the per-chunk and acoustic-profile blocks are omitted.
  std::vector<ChunkAnalysis> chunk_details;
  std::optional<std::vector<PhonemeScore>> phoneme_correlation;
  std::string locale_desc;
  std::string schema_str;
};

/// Context with locale_desc looked up from the patient's locale and the
/// canonical plan schema filled in.
PromptContext make_context(PatientProfile patient,
                           std::optional<OverallClassification> classification,
                           std::vector<ChunkAnalysis> chunk_details = {},
                           std::optional<std::vector<PhonemeScore>> correlation = {});

/// "en-US" -> "English (United States)"; unknown tags come back unchanged.
std::string locale_description(std::string_view locale);

struct RenderedPrompt {
  std::string system;
  std::string human;
};

// All renderers throw Error(MissingContext, <placeholder>) when required data
// is absent or blank.

RenderedPrompt render_therapy_prompt(const PromptContext& ctx,
                                     const TemplateSet& templates = TemplateSet::builtin());

RenderedPrompt render_critic_prompt(const TherapyPlan& plan, const PromptContext& ctx,
                                    const TemplateSet& templates = TemplateSet::builtin());

RenderedPrompt render_refinement_prompt(const TherapyPlan& plan,
                                        std::string_view critic_feedback,
                                        const PromptContext& ctx,
                                        const TemplateSet& templates = TemplateSet::builtin());

/// The revision template is a single message; it is sent as the human turn
/// after the refinement system message (see render_human_revision_request).
std::string render_human_revision_prompt(const TherapyPlan& plan,
                                         std::string_view clinician_feedback,
                                         const PromptContext& ctx,
                                         const TemplateSet& templates = TemplateSet::builtin());

RenderedPrompt render_human_revision_request(const TherapyPlan& plan,
                                             std::string_view clinician_feedback,
                                             const PromptContext& ctx,
                                             const TemplateSet& templates = TemplateSet::builtin());

// Text fragments shared by several prompts.
std::string format_percent(double pct);
std::string format_distribution(const LabelDistribution& fractions);
std::string format_correlation(const std::vector<PhonemeScore>& scores);

}  // namespace fluency::prompt
