#pragma once

// Canonical JSON forms of the domain types: field names as declared, enum
// values as returned by the matching to_string overloads.

#include <nlohmann/json.hpp>

#include "fluency/core/plan.hpp"
#include "fluency/core/types.hpp"

namespace fluency {

using Json = nlohmann::json;

void to_json(Json& j, StutterLabel label);
void from_json(const Json& j, StutterLabel& label);
void to_json(Json& j, Severity severity);
void from_json(const Json& j, Severity& severity);

void to_json(Json& j, const SegmentationConfig& config);
void from_json(const Json& j, SegmentationConfig& config);

void to_json(Json& j, const ChunkAnalysis& analysis);
void from_json(const Json& j, ChunkAnalysis& analysis);

void to_json(Json& j, const PhonemeScore& score);
void from_json(const Json& j, PhonemeScore& score);

void to_json(Json& j, const OverallClassification& classification);
void from_json(const Json& j, OverallClassification& classification);

void to_json(Json& j, const PatientProfile& patient);
void from_json(const Json& j, PatientProfile& patient);

void to_json(Json& j, const ClinicalReasoning& reasoning);
void from_json(const Json& j, ClinicalReasoning& reasoning);
void to_json(Json& j, const Strategy& strategy);
void from_json(const Json& j, Strategy& strategy);
void to_json(Json& j, const PlanStep& step);
void from_json(const Json& j, PlanStep& step);
void to_json(Json& j, const TherapyPlan& plan);
// Lenient: absent keys decode as empty values. Run validate_plan_json first
// when the input is untrusted.
void from_json(const Json& j, TherapyPlan& plan);

void to_json(Json& j, const Violation& violation);

void to_json(Json& j, const DomainReview& review);
void from_json(const Json& j, DomainReview& review);
void to_json(Json& j, const CriticReview& review);
void from_json(const Json& j, CriticReview& review);

void to_json(Json& j, const GenerationRecord& record);
void from_json(const Json& j, GenerationRecord& record);

/// Two-space indented canonical text of a plan, as embedded in prompts.
std::string plan_json_text(const TherapyPlan& plan);

}  // namespace fluency
