#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fluency {

/// The four-part reasoning chain every strategy must carry. Field names
/// follow the camelCase keys models are prompted to emit.
struct ClinicalReasoning {
  std::string observation;
  std::string clinicalRationale;
  std::string expectedOutcome;
  std::string evidenceBase;

  friend bool operator==(const ClinicalReasoning&,
                         const ClinicalReasoning&) = default;
};

struct Strategy {
  std::string name;
  std::string description;
  std::string instructions;
  ClinicalReasoning clinical_reasoning;

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

struct PlanStep {
  std::string name;
  std::string week_range;
  std::string objective;
  std::vector<Strategy> strategies;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct PlanExplanation {
  std::string stuttering_type_definition;
  std::string patient_characteristics;
  std::string therapeutic_rationale;

  friend bool operator==(const PlanExplanation&,
                         const PlanExplanation&) = default;
};

struct PrimaryGoal {
  std::string goal;
  std::string target;
  std::string baseline;
  std::string rationale;

  friend bool operator==(const PrimaryGoal&, const PrimaryGoal&) = default;
};

struct TherapyPlan {
  PlanExplanation explanation;
  PrimaryGoal primary_goal;
  std::vector<PlanStep> steps;
  // Derived: mirrors detect_red_flag(render_plan_text(*this)).
  bool urgent_flag = false;

  friend bool operator==(const TherapyPlan&, const TherapyPlan&) = default;
};

enum class ViolationReason { MissingField, EmptyField, NoSteps, DuplicateDomain };

std::string_view to_string(ViolationReason reason);

struct Violation {
  std::string path;
  ViolationReason reason = ViolationReason::MissingField;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Walks a JSON plan and reports every defect (no short-circuit). Missing or
/// mistyped keys are MissingField; blank strings and empty strategy lists are
/// EmptyField; an empty step list is NoSteps.
std::vector<Violation> validate_plan_json(const nlohmann::json& plan);

std::vector<Violation> validate_plan(const TherapyPlan& plan);

/// Soft findings that never block a plan: an empty primary-goal rationale and
/// a therapeutic rationale lacking the "IMPORTANT LIMITATION" caution.
std::vector<std::string> plan_warnings(const TherapyPlan& plan);

inline constexpr std::string_view kRedFlagMarker = "URGENT CLINICAL NOTE";
inline constexpr std::string_view kLimitationMarker = "IMPORTANT LIMITATION";

/// Exact, case-sensitive search for the red-flag marker.
bool detect_red_flag(std::string_view plan_text);

/// Plain-text rendering of every field of the plan, in document order.
std::string render_plan_text(const TherapyPlan& plan);

/// Recomputes urgent_flag from the plan's text.
void refresh_urgent_flag(TherapyPlan& plan);

/// Canonical schema for TherapyPlan, as the formatted JSON placed in prompts.
const std::string& plan_schema_text();

// -- critic review ---------------------------------------------------------

enum class CriticDomain {
  ClinicalSoundness,
  SafetyConcerns,
  EvidenceStrength,
  ImprovementsNeeded,
  StructureAndClarity,
  ExplainabilityTransparency,
};

inline constexpr std::array<CriticDomain, 6> kAllCriticDomains = {
    CriticDomain::ClinicalSoundness,   CriticDomain::SafetyConcerns,
    CriticDomain::EvidenceStrength,    CriticDomain::ImprovementsNeeded,
    CriticDomain::StructureAndClarity, CriticDomain::ExplainabilityTransparency,
};

std::string_view to_string(CriticDomain domain);
std::optional<CriticDomain> critic_domain_from_string(std::string_view text);
/// Heading as it appears in the critic prompt ("Safety Concerns").
std::string_view heading(CriticDomain domain);

struct DomainReview {
  std::string observation;
  std::string strengths;
  std::string concerns;
  std::string recommendations;

  friend bool operator==(const DomainReview&, const DomainReview&) = default;
};

struct CriticReview {
  std::vector<std::pair<CriticDomain, DomainReview>> domains;

  friend bool operator==(const CriticReview&, const CriticReview&) = default;
};

/// MissingField for each absent domain, DuplicateDomain for repeats.
std::vector<Violation> validate_critic_review(const CriticReview& review);

/// Best-effort extraction of the bullet format the critic is prompted with.
/// Domains that do not appear are simply absent from the result.
CriticReview parse_critic_text(std::string_view text);

// -- generation audit ---------------------------------------------------------

enum class GenerationRole { TherapyInitial, Critic, Refine, HumanRevision };

std::string_view to_string(GenerationRole role);
std::optional<GenerationRole> generation_role_from_string(std::string_view text);

struct GenerationRecord {
  int round = 0;
  GenerationRole role = GenerationRole::TherapyInitial;
  std::string prompt_system;
  std::string prompt_human;
  std::string raw_output;
  bool parsed_ok = false;
  std::string parse_error;

  friend bool operator==(const GenerationRecord&,
                         const GenerationRecord&) = default;
};

}  // namespace fluency
