#include "fluency/core/serialize.hpp"

#include "fluency/core/error.hpp"

namespace fluency {

namespace {

std::string str_or_empty(const Json& j, const char* key) {
  auto it = j.find(key);
  return it != j.end() && it->is_string() ? it->get<std::string>()
                                          : std::string{};
}

[[noreturn]] void bad_value(const char* what, const Json& j) {
  throw Error(ErrorCode::InvalidInput,
              std::string("unknown ") + what + " " + j.dump());
}

}  // namespace

void to_json(Json& j, StutterLabel label) { j = std::string(to_string(label)); }

void from_json(const Json& j, StutterLabel& label) {
  auto parsed = label_from_string(j.get<std::string>());
  if (!parsed) bad_value("stutter label", j);
  label = *parsed;
}

void to_json(Json& j, Severity severity) {
  j = std::string(to_string(severity));
}

void from_json(const Json& j, Severity& severity) {
  auto parsed = severity_from_string(j.get<std::string>());
  if (!parsed) bad_value("severity", j);
  severity = *parsed;
}

void to_json(Json& j, const SegmentationConfig& config) {
  j = Json{{"duration_s", config.duration_s()},
           {"overlap_pct", config.overlap_pct()}};
}

void from_json(const Json& j, SegmentationConfig& config) {
  config = SegmentationConfig::make(j.value("duration_s", 4),
                                    j.value("overlap_pct", 50));
}

void to_json(Json& j, const ChunkAnalysis& a) {
  Json probs = Json::object();
  for (const auto& [label, p] : a.label_probs) {
    probs[std::string(to_string(label))] = p;
  }
  j = Json{{"chunk_index", a.chunk_index},
           {"start_s", a.start_s},
           {"end_s", a.end_s},
           {"label_probs", std::move(probs)},
           {"top_label", a.top_label},
           {"confidence", a.confidence}};
  if (a.transcript) j["transcript"] = *a.transcript;
  if (a.phonemes) j["phonemes"] = *a.phonemes;
}

void from_json(const Json& j, ChunkAnalysis& a) {
  a = ChunkAnalysis{};
  a.chunk_index = j.at("chunk_index").get<int>();
  a.start_s = j.value("start_s", 0.0);
  a.end_s = j.value("end_s", 0.0);
  for (const auto& [key, value] : j.at("label_probs").items()) {
    auto label = label_from_string(key);
    if (!label) bad_value("stutter label", Json(key));
    a.label_probs[*label] = value.get<double>();
  }
  a.top_label = j.at("top_label").get<StutterLabel>();
  a.confidence = j.at("confidence").get<double>();
  if (auto it = j.find("transcript"); it != j.end() && !it->is_null()) {
    a.transcript = it->get<std::string>();
  }
  if (auto it = j.find("phonemes"); it != j.end() && !it->is_null()) {
    a.phonemes = it->get<std::vector<std::string>>();
  }
}

void to_json(Json& j, const PhonemeScore& s) {
  j = Json{{"phoneme", s.phoneme}, {"ratio", s.ratio}};
}

void from_json(const Json& j, PhonemeScore& s) {
  s.phoneme = j.at("phoneme").get<std::string>();
  s.ratio = j.at("ratio").get<double>();
}

void to_json(Json& j, const OverallClassification& c) {
  j = Json{{"primary_type", c.primary_type},
           {"weighted_confidence", c.weighted_confidence},
           {"severity", c.severity},
           {"stuttering_pct", c.stuttering_pct},
           {"problematic_phonemes", c.problematic_phonemes}};
  if (c.secondary_type) j["secondary_type"] = *c.secondary_type;
}

void from_json(const Json& j, OverallClassification& c) {
  c = OverallClassification{};
  c.primary_type = j.at("primary_type").get<StutterLabel>();
  if (auto it = j.find("secondary_type"); it != j.end() && !it->is_null()) {
    c.secondary_type = it->get<StutterLabel>();
  }
  c.weighted_confidence = j.at("weighted_confidence").get<double>();
  c.severity = j.at("severity").get<Severity>();
  c.stuttering_pct = j.at("stuttering_pct").get<double>();
  c.problematic_phonemes =
      j.value("problematic_phonemes", std::vector<PhonemeScore>{});
}

void to_json(Json& j, const PatientProfile& p) {
  j = Json{{"demographics", p.demographics},
           {"clinical_history", p.clinical_history},
           {"therapy_background", p.therapy_background},
           {"goals", p.goals},
           {"locale", p.locale}};
}

void from_json(const Json& j, PatientProfile& p) {
  p.demographics = str_or_empty(j, "demographics");
  p.clinical_history = str_or_empty(j, "clinical_history");
  p.therapy_background = str_or_empty(j, "therapy_background");
  p.goals = str_or_empty(j, "goals");
  p.locale = j.value("locale", std::string("en-US"));
}

void to_json(Json& j, const ClinicalReasoning& r) {
  j = Json{{"observation", r.observation},
           {"clinicalRationale", r.clinicalRationale},
           {"expectedOutcome", r.expectedOutcome},
           {"evidenceBase", r.evidenceBase}};
}

void from_json(const Json& j, ClinicalReasoning& r) {
  r.observation = str_or_empty(j, "observation");
  r.clinicalRationale = str_or_empty(j, "clinicalRationale");
  r.expectedOutcome = str_or_empty(j, "expectedOutcome");
  r.evidenceBase = str_or_empty(j, "evidenceBase");
}

void to_json(Json& j, const Strategy& s) {
  j = Json{{"name", s.name},
           {"description", s.description},
           {"instructions", s.instructions},
           {"clinical_reasoning", s.clinical_reasoning}};
}

void from_json(const Json& j, Strategy& s) {
  s.name = str_or_empty(j, "name");
  s.description = str_or_empty(j, "description");
  s.instructions = str_or_empty(j, "instructions");
  if (auto it = j.find("clinical_reasoning");
      it != j.end() && it->is_object()) {
    s.clinical_reasoning = it->get<ClinicalReasoning>();
  } else {
    s.clinical_reasoning = {};
  }
}

void to_json(Json& j, const PlanStep& s) {
  j = Json{{"name", s.name},
           {"week_range", s.week_range},
           {"objective", s.objective},
           {"strategies", s.strategies}};
}

void from_json(const Json& j, PlanStep& s) {
  s.name = str_or_empty(j, "name");
  s.week_range = str_or_empty(j, "week_range");
  s.objective = str_or_empty(j, "objective");
  s.strategies.clear();
  if (auto it = j.find("strategies"); it != j.end() && it->is_array()) {
    for (const auto& item : *it) {
      if (item.is_object()) s.strategies.push_back(item.get<Strategy>());
    }
  }
}

void to_json(Json& j, const TherapyPlan& p) {
  j = Json{{"explanation",
            {{"stuttering_type_definition",
              p.explanation.stuttering_type_definition},
             {"patient_characteristics", p.explanation.patient_characteristics},
             {"therapeutic_rationale", p.explanation.therapeutic_rationale}}},
           {"primary_goal",
            {{"goal", p.primary_goal.goal},
             {"target", p.primary_goal.target},
             {"baseline", p.primary_goal.baseline},
             {"rationale", p.primary_goal.rationale}}},
           {"steps", p.steps},
           {"urgent_flag", p.urgent_flag}};
}

void from_json(const Json& j, TherapyPlan& p) {
  p = TherapyPlan{};
  if (auto e = j.find("explanation"); e != j.end() && e->is_object()) {
    p.explanation.stuttering_type_definition =
        str_or_empty(*e, "stuttering_type_definition");
    p.explanation.patient_characteristics =
        str_or_empty(*e, "patient_characteristics");
    p.explanation.therapeutic_rationale =
        str_or_empty(*e, "therapeutic_rationale");
  }
  if (auto g = j.find("primary_goal"); g != j.end() && g->is_object()) {
    p.primary_goal.goal = str_or_empty(*g, "goal");
    p.primary_goal.target = str_or_empty(*g, "target");
    p.primary_goal.baseline = str_or_empty(*g, "baseline");
    p.primary_goal.rationale = str_or_empty(*g, "rationale");
  }
  if (auto s = j.find("steps"); s != j.end() && s->is_array()) {
    for (const auto& item : *s) {
      if (item.is_object()) p.steps.push_back(item.get<PlanStep>());
    }
  }
  refresh_urgent_flag(p);
}

void to_json(Json& j, const Violation& v) {
  j = Json{{"path", v.path}, {"reason", std::string(to_string(v.reason))}};
  if (!v.detail.empty()) j["detail"] = v.detail;
}

void to_json(Json& j, const DomainReview& r) {
  j = Json{{"observation", r.observation},
           {"strengths", r.strengths},
           {"concerns", r.concerns},
           {"recommendations", r.recommendations}};
}

void from_json(const Json& j, DomainReview& r) {
  r.observation = str_or_empty(j, "observation");
  r.strengths = str_or_empty(j, "strengths");
  r.concerns = str_or_empty(j, "concerns");
  r.recommendations = str_or_empty(j, "recommendations");
}

// Serialized as an array so that duplicate domains survive a round trip.
void to_json(Json& j, const CriticReview& review) {
  j = Json{{"domains", Json::array()}};
  for (const auto& [domain, r] : review.domains) {
    Json entry = r;
    entry["domain"] = std::string(to_string(domain));
    j["domains"].push_back(std::move(entry));
  }
}

void from_json(const Json& j, CriticReview& review) {
  review.domains.clear();
  for (const auto& entry : j.at("domains")) {
    auto domain = critic_domain_from_string(entry.at("domain").get<std::string>());
    if (!domain) bad_value("critic domain", entry.at("domain"));
    review.domains.emplace_back(*domain, entry.get<DomainReview>());
  }
}

void to_json(Json& j, const GenerationRecord& r) {
  j = Json{{"round", r.round},
           {"role", std::string(to_string(r.role))},
           {"prompt_system", r.prompt_system},
           {"prompt_human", r.prompt_human},
           {"raw_output", r.raw_output},
           {"parsed_ok", r.parsed_ok}};
  if (!r.parse_error.empty()) j["parse_error"] = r.parse_error;
}

void from_json(const Json& j, GenerationRecord& r) {
  r.round = j.at("round").get<int>();
  auto role = generation_role_from_string(j.at("role").get<std::string>());
  if (!role) bad_value("generation role", j.at("role"));
  r.role = *role;
  r.prompt_system = j.value("prompt_system", std::string{});
  r.prompt_human = j.value("prompt_human", std::string{});
  r.raw_output = j.value("raw_output", std::string{});
  r.parsed_ok = j.value("parsed_ok", false);
  r.parse_error = j.value("parse_error", std::string{});
}

std::string plan_json_text(const TherapyPlan& plan) {
  return Json(plan).dump(2, ' ', false, Json::error_handler_t::replace);
}

}  // namespace fluency
