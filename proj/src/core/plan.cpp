#include "fluency/core/plan.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "fluency/core/serialize.hpp"

namespace fluency {

std::string_view to_string(ViolationReason reason) {
  switch (reason) {
    case ViolationReason::MissingField: return "missing_field";
    case ViolationReason::EmptyField: return "empty_field";
    case ViolationReason::NoSteps: return "no_steps";
    case ViolationReason::DuplicateDomain: return "duplicate_domain";
  }
  return "missing_field";
}

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

class PlanWalker {
 public:
  std::vector<Violation> take() { return std::move(out_); }

  void missing(std::string path, std::string detail = {}) {
    out_.push_back({std::move(path), ViolationReason::MissingField,
                    std::move(detail)});
  }
  void no_steps() {
    out_.push_back({"steps", ViolationReason::NoSteps, "plan has no steps"});
  }
  void empty(std::string path, std::string detail = {}) {
    out_.push_back({std::move(path), ViolationReason::EmptyField,
                    std::move(detail)});
  }

  // Returns the object at j[key] or nullptr after recording a violation.
  const Json* object(const Json& j, const std::string& key,
                     const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) {
      missing(path);
      return nullptr;
    }
    if (!it->is_object()) {
      missing(path, "expected object");
      return nullptr;
    }
    return &*it;
  }

  void text(const Json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) {
      missing(path);
    } else if (!it->is_string()) {
      missing(path, "expected string");
    } else if (is_blank(it->get_ref<const std::string&>())) {
      empty(path);
    }
  }

  void reasoning(const Json& strategy, const std::string& path) {
    const Json* r = object(strategy, "clinical_reasoning", path);
    if (r == nullptr) return;
    for (const char* key : {"observation", "clinicalRationale",
                            "expectedOutcome", "evidenceBase"}) {
      text(*r, key, path + "." + key);
    }
  }

  void strategy(const Json& s, const std::string& path) {
    if (!s.is_object()) {
      missing(path, "expected object");
      return;
    }
    text(s, "name", path + ".name");
    text(s, "description", path + ".description");
    text(s, "instructions", path + ".instructions");
    reasoning(s, path + ".clinical_reasoning");
  }

  void step(const Json& s, const std::string& path) {
    if (!s.is_object()) {
      missing(path, "expected object");
      return;
    }
    text(s, "name", path + ".name");
    text(s, "week_range", path + ".week_range");
    text(s, "objective", path + ".objective");
    auto it = s.find("strategies");
    const std::string spath = path + ".strategies";
    if (it == s.end()) {
      missing(spath);
    } else if (!it->is_array()) {
      missing(spath, "expected array");
    } else if (it->empty()) {
      empty(spath, "at least one strategy required");
    } else {
      for (std::size_t i = 0; i < it->size(); ++i) {
        strategy((*it)[i], spath + "[" + std::to_string(i) + "]");
      }
    }
  }

 private:
  std::vector<Violation> out_;
};

void append_line(std::ostringstream& os, std::string_view label,
                 std::string_view value) {
  os << label << ": " << value << '\n';
}

}  // namespace

std::vector<Violation> validate_plan_json(const Json& plan) {
  PlanWalker w;
  if (!plan.is_object()) {
    w.missing("", "expected object");
    return w.take();
  }
  if (const Json* e = w.object(plan, "explanation", "explanation")) {
    for (const char* key : {"stuttering_type_definition",
                            "patient_characteristics",
                            "therapeutic_rationale"}) {
      w.text(*e, key, std::string("explanation.") + key);
    }
  }
  if (const Json* g = w.object(plan, "primary_goal", "primary_goal")) {
    for (const char* key : {"goal", "target", "baseline"}) {
      w.text(*g, key, std::string("primary_goal.") + key);
    }
    // rationale is optional; see plan_warnings.
    auto it = g->find("rationale");
    if (it != g->end() && !it->is_string()) {
      w.missing("primary_goal.rationale", "expected string");
    }
  }
  auto steps = plan.find("steps");
  if (steps == plan.end()) {
    w.missing("steps");
  } else if (!steps->is_array()) {
    w.missing("steps", "expected array");
  } else if (steps->empty()) {
    w.no_steps();
  } else {
    for (std::size_t i = 0; i < steps->size(); ++i) {
      w.step((*steps)[i], "steps[" + std::to_string(i) + "]");
    }
  }
  if (auto flag = plan.find("urgent_flag");
      flag != plan.end() && !flag->is_boolean()) {
    w.missing("urgent_flag", "expected boolean");
  }
  return w.take();
}

std::vector<Violation> validate_plan(const TherapyPlan& plan) {
  return validate_plan_json(Json(plan));
}

std::vector<std::string> plan_warnings(const TherapyPlan& plan) {
  std::vector<std::string> out;
  if (is_blank(plan.primary_goal.rationale)) {
    out.emplace_back("primary_goal.rationale is empty");
  }
  if (plan.explanation.therapeutic_rationale.find(kLimitationMarker) ==
      std::string::npos) {
    out.emplace_back(
        "explanation.therapeutic_rationale lacks the IMPORTANT LIMITATION "
        "caution");
  }
  return out;
}

bool detect_red_flag(std::string_view plan_text) {
  return plan_text.find(kRedFlagMarker) != std::string_view::npos;
}

std::string render_plan_text(const TherapyPlan& plan) {
  std::ostringstream os;
  os << "EXPLANATION\n";
  append_line(os, "Stuttering Type", plan.explanation.stuttering_type_definition);
  append_line(os, "Patient Characteristics",
              plan.explanation.patient_characteristics);
  append_line(os, "Therapeutic Rationale",
              plan.explanation.therapeutic_rationale);
  os << "\nPRIMARY GOAL\n";
  append_line(os, "Goal", plan.primary_goal.goal);
  append_line(os, "Target", plan.primary_goal.target);
  append_line(os, "Baseline", plan.primary_goal.baseline);
  append_line(os, "Rationale", plan.primary_goal.rationale);
  os << "\nSTEP BY STEP PLAN\n";
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    os << "\nStep " << (i + 1) << ": " << step.name << '\n';
    append_line(os, "Week Range", step.week_range);
    append_line(os, "Objective", step.objective);
    for (const auto& s : step.strategies) {
      os << "\n  " << s.name << '\n';
      append_line(os, "  Description", s.description);
      append_line(os, "  Instructions", s.instructions);
      append_line(os, "  Observation", s.clinical_reasoning.observation);
      append_line(os, "  Clinical Rationale",
                  s.clinical_reasoning.clinicalRationale);
      append_line(os, "  Expected Outcome",
                  s.clinical_reasoning.expectedOutcome);
      append_line(os, "  Evidence Base", s.clinical_reasoning.evidenceBase);
    }
  }
  return os.str();
}

void refresh_urgent_flag(TherapyPlan& plan) {
  plan.urgent_flag = detect_red_flag(render_plan_text(plan));
}

const std::string& plan_schema_text() {
  static const std::string text = [] {
    auto str = [](const char* description) {
      return Json{{"type", "string"}, {"description", description}};
    };
    Json reasoning = {
        {"type", "object"},
        {"required", {"observation", "clinicalRationale", "expectedOutcome",
                      "evidenceBase"}},
        {"properties",
         {{"observation",
           str("Specific pattern in the patient's stuttering analysis that "
               "motivates this strategy")},
          {"clinicalRationale",
           str("Why this strategy is the clinically appropriate response")},
          {"expectedOutcome", str("Measurable, time-bound expected outcome")},
          {"evidenceBase", str("Clinical guideline or literature reference")}}}};
    Json strategy = {
        {"type", "object"},
        {"required", {"name", "description", "instructions",
                      "clinical_reasoning"}},
        {"properties",
         {{"name", str("Strategy name")},
          {"description", str("One or two sentence summary")},
          {"instructions",
           str("Approach, purpose, practice items, home practice and "
               "troubleshooting")},
          {"clinical_reasoning", reasoning}}}};
    Json step = {
        {"type", "object"},
        {"required", {"name", "week_range", "objective", "strategies"}},
        {"properties",
         {{"name", str("Step title")},
          {"week_range", str("e.g. Weeks 1-2")},
          {"objective", str("What the patient will achieve in this step")},
          {"strategies",
           {{"type", "array"}, {"minItems", 1}, {"items", strategy}}}}}};
    Json schema = {
        {"type", "object"},
        {"required", {"explanation", "primary_goal", "steps"}},
        {"properties",
         {{"explanation",
           {{"type", "object"},
            {"required", {"stuttering_type_definition",
                          "patient_characteristics", "therapeutic_rationale"}},
            {"properties",
             {{"stuttering_type_definition", str("Assessment of profile")},
              {"patient_characteristics",
               str("Observed characteristics of this patient")},
              {"therapeutic_rationale", str("Approach and why")}}}}},
          {"primary_goal",
           {{"type", "object"},
            {"required", {"goal", "target", "baseline", "rationale"}},
            {"properties",
             {{"goal", str("Functional goal linked to real contexts")},
              {"target", str("Measurable target")},
              {"baseline", str("Current baseline")},
              {"rationale", str("Psychoeducation")}}}}},
          {"steps", {{"type", "array"}, {"minItems", 1}, {"items", step}}}}}};
    return schema.dump(2);
  }();
  return text;
}

// -- critic review -----------------------------------------------------------

std::string_view to_string(CriticDomain domain) {
  switch (domain) {
    case CriticDomain::ClinicalSoundness: return "ClinicalSoundness";
    case CriticDomain::SafetyConcerns: return "SafetyConcerns";
    case CriticDomain::EvidenceStrength: return "EvidenceStrength";
    case CriticDomain::ImprovementsNeeded: return "ImprovementsNeeded";
    case CriticDomain::StructureAndClarity: return "StructureAndClarity";
    case CriticDomain::ExplainabilityTransparency:
      return "ExplainabilityTransparency";
  }
  return "ClinicalSoundness";
}

std::optional<CriticDomain> critic_domain_from_string(std::string_view text) {
  for (auto d : kAllCriticDomains) {
    if (to_string(d) == text) return d;
  }
  return std::nullopt;
}

std::string_view heading(CriticDomain domain) {
  switch (domain) {
    case CriticDomain::ClinicalSoundness: return "Clinical Soundness";
    case CriticDomain::SafetyConcerns: return "Safety Concerns";
    case CriticDomain::EvidenceStrength: return "Evidence Strength";
    case CriticDomain::ImprovementsNeeded: return "Improvements Needed";
    case CriticDomain::StructureAndClarity: return "Structure and Clarity";
    case CriticDomain::ExplainabilityTransparency:
      return "Explainability and Reasoning Transparency";
  }
  return "";
}

std::vector<Violation> validate_critic_review(const CriticReview& review) {
  std::vector<Violation> out;
  for (auto d : kAllCriticDomains) {
    auto n = std::count_if(review.domains.begin(), review.domains.end(),
                           [d](const auto& e) { return e.first == d; });
    std::string path = "domains." + std::string(to_string(d));
    if (n == 0) {
      out.push_back({path, ViolationReason::MissingField, {}});
    } else if (n > 1) {
      out.push_back({path, ViolationReason::DuplicateDomain,
                     std::to_string(n) + " occurrences"});
    }
  }
  return out;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

// Drops list markers and emphasis: "- **Clinical Soundness**:" -> "Clinical
// Soundness**:" -> handled by the caller's prefix match.
std::string_view strip_marker(std::string_view s) {
  s = trim(s);
  while (!s.empty() && (s.front() == '-' || s.front() == '*' ||
                        s.front() == '#' || s.front() == '>' ||
                        std::isdigit(static_cast<unsigned char>(s.front())) ||
                        (s.front() == '.' || s.front() == ')'))) {
    s.remove_prefix(1);
    s = trim(s);
  }
  if (s.rfind("\xE2\x80\xA2", 0) == 0) s = trim(s.substr(3));  // bullet
  return s;
}

}  // namespace

CriticReview parse_critic_text(std::string_view text) {
  CriticReview review;
  DomainReview* current = nullptr;
  std::string* field = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    std::string_view line = strip_marker(raw);
    std::string low = lower(line);
    bool matched = false;
    for (auto d : kAllCriticDomains) {
      std::string h = lower(heading(d));
      if (low.rfind(h, 0) == 0) {
        std::string_view rest = trim(line.substr(h.size()));
        while (!rest.empty() && (rest.front() == '*' || rest.front() == ':'))
          rest = trim(rest.substr(1));
        // "Domain Name (e.g., ...)" header lines carry nothing else; a domain
        // heading followed by prose is still a heading.
        review.domains.push_back({d, {}});
        current = &review.domains.back().second;
        field = nullptr;
        matched = true;
        break;
      }
    }
    if (matched || current == nullptr) continue;
    static constexpr std::pair<std::string_view, std::string DomainReview::*>
        kFields[] = {{"observation", &DomainReview::observation},
                     {"strengths", &DomainReview::strengths},
                     {"concerns", &DomainReview::concerns},
                     {"recommendations", &DomainReview::recommendations}};
    for (const auto& [name, member] : kFields) {
      if (low.rfind(name, 0) == 0) {
        std::string_view rest = line.substr(name.size());
        while (!rest.empty() && (rest.front() == '*' || rest.front() == ':'))
          rest.remove_prefix(1);
        field = &(current->*member);
        *field = std::string(trim(rest));
        matched = true;
        break;
      }
    }
    if (!matched && field != nullptr && !trim(line).empty()) {
      if (!field->empty()) *field += ' ';
      *field += std::string(trim(line));
    }
  }
  return review;
}

std::string_view to_string(GenerationRole role) {
  switch (role) {
    case GenerationRole::TherapyInitial: return "therapy_initial";
    case GenerationRole::Critic: return "critic";
    case GenerationRole::Refine: return "refine";
    case GenerationRole::HumanRevision: return "human_revision";
  }
  return "therapy_initial";
}

std::optional<GenerationRole> generation_role_from_string(std::string_view t) {
  for (auto r : {GenerationRole::TherapyInitial, GenerationRole::Critic,
                 GenerationRole::Refine, GenerationRole::HumanRevision}) {
    if (to_string(r) == t) return r;
  }
  return std::nullopt;
}

}  // namespace fluency
