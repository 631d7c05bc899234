#include "fluency/prompt/render.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "fluency/analysis/aggregate.hpp"
#include "fluency/core/error.hpp"
#include "fluency/core/serialize.hpp"

namespace fluency::prompt {

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::string required(std::string_view name, std::string value) {
  if (blank(value)) throw Error(ErrorCode::MissingContext, std::string(name));
  return value;
}

const OverallClassification& classification_of(const PromptContext& ctx,
                                                std::string_view placeholder) {
  if (!ctx.classification) {
    throw Error(ErrorCode::MissingContext, std::string(placeholder));
  }
  return *ctx.classification;
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string characteristics(const PatientProfile& p) {
  std::string out;
  auto add = [&out](std::string_view label, const std::string& value) {
    if (blank(value)) return;
    if (!out.empty()) out += "; ";
    out += std::string(label) + ": " + value;
  };
  add("Demographics", p.demographics);
  add("Clinical history", p.clinical_history);
  add("Therapy background", p.therapy_background);
  add("Goals", p.goals);
  return out.empty() ? "Not specified" : out;
}

std::string transcription(const PromptContext& ctx) {
  std::string out;
  for (const auto& a : ctx.chunk_details) {
    if (!a.transcript || blank(*a.transcript)) continue;
    if (!out.empty()) out += ' ';
    out += *a.transcript;
  }
  return out.empty() ? "N/A" : out;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

// Phonemes chunk by chunk, chunks separated by " | ".
std::string phoneme_text(const PromptContext& ctx) {
  std::vector<std::string> parts;
  for (const auto& a : ctx.chunk_details) {
    if (a.phonemes && !a.phonemes->empty()) parts.push_back(join(*a.phonemes, " "));
  }
  return parts.empty() ? "N/A" : join(parts, " | ");
}

std::string distribution_text(const PromptContext& ctx) {
  if (ctx.chunk_details.empty()) return "N/A";
  return format_distribution(analysis::type_distribution(ctx.chunk_details));
}

std::string acoustic_profile(const PromptContext& ctx,
                             const OverallClassification& c) {
  return "Chunk Distribution: " + distribution_text(ctx) +
         "; Stuttering Percentage: " + format_percent(c.stuttering_pct) +
         "%; Severity: " + std::string(to_string(c.severity)) +
         "; Weighted Confidence: " + fixed(c.weighted_confidence, 2);
}

std::string acoustic_block(const PromptContext& ctx, const OverallClassification& c) {
  std::string out = "\nACOUSTIC PROFILE:\n";
  out += "- Chunk Distribution: " + distribution_text(ctx) + "\n";
  out += "- Stuttering Percentage: " + format_percent(c.stuttering_pct) + "%\n";
  out += "- Severity: " + std::string(to_string(c.severity)) + "\n";
  out += "- Weighted Confidence: " + fixed(c.weighted_confidence, 2);
  if (c.secondary_type) {
    out += "\n- Secondary Type: " + std::string(display_name(*c.secondary_type));
  }
  return out;
}

std::string per_chunk_block(const PromptContext& ctx) {
  std::string out = "\nPER-CHUNK ANALYSIS:";
  for (const auto& a : ctx.chunk_details) {
    out += "\n- Chunk " + std::to_string(a.chunk_index) + " [" + fixed(a.start_s, 2) +
           "-" + fixed(a.end_s, 2) + " s]: " + std::string(display_name(a.top_label)) +
           " (confidence " + fixed(a.confidence, 2) + ")";
    if (a.transcript && !blank(*a.transcript)) out += "; text: \"" + *a.transcript + "\"";
    if (a.phonemes && !a.phonemes->empty()) out += "; phonemes: " + join(*a.phonemes, " ");
  }
  return out;
}

std::string correlation_block(const std::vector<PhonemeScore>& scores) {
  return "\nPHONEME-DISFLUENCY CORRELATION:\n- " + format_correlation(scores);
}

}  // namespace

std::string locale_description(std::string_view locale) {
  static const std::pair<std::string_view, std::string_view> kTable[] = {
      {"en-US", "English (United States)"},
      {"en-GB", "English (United Kingdom)"},
      {"fr-FR", "French (France)"},
      {"pt-PT", "Portuguese (Portugal)"},
      {"de-DE", "German (Germany)"},
  };
  for (const auto& [tag, desc] : kTable) {
    if (tag == locale) return std::string(desc);
  }
  return std::string(locale);
}

PromptContext make_context(PatientProfile patient,
                           std::optional<OverallClassification> classification,
                           std::vector<ChunkAnalysis> chunk_details,
                           std::optional<std::vector<PhonemeScore>> correlation) {
  PromptContext ctx;
  ctx.locale_desc = locale_description(patient.locale);
  ctx.schema_str = plan_schema_text();
  ctx.patient = std::move(patient);
  ctx.classification = std::move(classification);
  ctx.chunk_details = std::move(chunk_details);
  ctx.phoneme_correlation = std::move(correlation);
  return ctx;
}

std::string format_percent(double pct) {
  std::string s = fixed(pct, 1);
  if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
  return s;
}

std::string format_distribution(const LabelDistribution& fractions) {
  std::string out;
  for (auto label : kAllLabels) {
    auto it = fractions.find(label);
    if (it == fractions.end() || it->second <= 0.0) continue;
    if (!out.empty()) out += ", ";
    out += std::string(display_name(label)) + " " + format_percent(100.0 * it->second) + "%";
  }
  return out.empty() ? "N/A" : out;
}

std::string format_correlation(const std::vector<PhonemeScore>& scores) {
  if (scores.empty()) return "No phoneme is over-represented in disfluent chunks";
  std::string out;
  for (const auto& s : scores) {
    if (!out.empty()) out += ", ";
    out += "/" + s.phoneme + "/ (ratio " + fixed(s.ratio, 2) + ")";
  }
  return out;
}

RenderedPrompt render_therapy_prompt(const PromptContext& ctx,
                                     const TemplateSet& templates) {
  const auto& c = classification_of(ctx, "stuttering_type");
  const Bindings system = {
      {"language_desc", required("language_desc", ctx.locale_desc)},
      {"schema_str", required("schema_str", ctx.schema_str)},
  };
  Bindings human = {
      {"stuttering_type", std::string(display_name(c.primary_type))},
      {"transcription", transcription(ctx)},
      {"phonemes", phoneme_text(ctx)},
      {"characteristics", characteristics(ctx.patient)},
      {"locale", required("locale", ctx.patient.locale)},
      {"acoustic_profile_block", std::nullopt},
      {"per_chunk_block", std::nullopt},
      {"phoneme_correlation_block", std::nullopt},
  };
  if (!ctx.chunk_details.empty()) {
    human["acoustic_profile_block"] = acoustic_block(ctx, c);
    human["per_chunk_block"] = per_chunk_block(ctx);
  }
  if (ctx.phoneme_correlation) {
    human["phoneme_correlation_block"] = correlation_block(*ctx.phoneme_correlation);
  }
  return {substitute(templates.text(TemplateId::TherapySystem), system),
          substitute(templates.text(TemplateId::TherapyHuman), human)};
}

RenderedPrompt render_critic_prompt(const TherapyPlan& plan, const PromptContext& ctx,
                                    const TemplateSet& templates) {
  const auto& c = classification_of(ctx, "primary_type");
  const Bindings system = {
      {"language_desc", required("language_desc", ctx.locale_desc)},
  };
  const Bindings human = {
      {"therapy_plan_json", plan_json_text(plan)},
      {"primary_type", std::string(display_name(c.primary_type))},
      {"type_distribution", distribution_text(ctx)},
      {"stuttering_percentage", format_percent(c.stuttering_pct)},
      {"phoneme_correlation_summary",
       ctx.phoneme_correlation ? format_correlation(*ctx.phoneme_correlation)
                               : std::string("N/A")},
  };
  return {substitute(templates.text(TemplateId::CriticSystem), system),
          substitute(templates.text(TemplateId::CriticHuman), human)};
}

RenderedPrompt render_refinement_prompt(const TherapyPlan& plan,
                                        std::string_view critic_feedback,
                                        const PromptContext& ctx,
                                        const TemplateSet& templates) {
  const std::string feedback = required("critic_feedback", std::string(critic_feedback));
  const auto& c = classification_of(ctx, "patient_info");
  const Bindings system = {
      {"language_desc", required("language_desc", ctx.locale_desc)},
  };
  Bindings human = {
      {"patient_info", "Type: " + std::string(display_name(c.primary_type)) +
                           "; Characteristics: " + characteristics(ctx.patient) +
                           "; Locale: " + ctx.patient.locale},
      {"acoustic_profile", std::nullopt},
      {"phoneme_correlation", std::nullopt},
      {"previous_plan_json", plan_json_text(plan)},
      {"critic_feedback", feedback},
  };
  if (!ctx.chunk_details.empty()) human["acoustic_profile"] = acoustic_profile(ctx, c);
  if (ctx.phoneme_correlation) {
    human["phoneme_correlation"] = format_correlation(*ctx.phoneme_correlation);
  }
  return {substitute(templates.text(TemplateId::RefineSystem), system),
          substitute(templates.text(TemplateId::RefineHuman), human)};
}

std::string render_human_revision_prompt(const TherapyPlan& plan,
                                         std::string_view clinician_feedback,
                                         const PromptContext& ctx,
                                         const TemplateSet& templates) {
  const std::string feedback =
      required("human_feedback", std::string(clinician_feedback));
  const auto& c = classification_of(ctx, "primary_type");
  const Bindings bindings = {
      {"human_feedback", feedback},
      {"current_plan_json", plan_json_text(plan)},
      {"primary_type", std::string(display_name(c.primary_type))},
      {"phonemes", phoneme_text(ctx)},
  };
  return substitute(templates.text(TemplateId::HumanRevision), bindings);
}

RenderedPrompt render_human_revision_request(const TherapyPlan& plan,
                                             std::string_view clinician_feedback,
                                             const PromptContext& ctx,
                                             const TemplateSet& templates) {
  std::string human = render_human_revision_prompt(plan, clinician_feedback, ctx, templates);
  const Bindings system = {
      {"language_desc", required("language_desc", ctx.locale_desc)},
  };
  return {substitute(templates.text(TemplateId::RefineSystem), system), std::move(human)};
}

}  // namespace fluency::prompt
