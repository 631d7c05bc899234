#include "fluency/service/record.hpp"

#include "fluency/analysis/aggregate.hpp"
#include "fluency/core/error.hpp"
#include "fluency/core/serialize.hpp"

namespace fluency::orchestrator {

void to_json(Json& j, const OrchestrationConfig& c) {
  j = Json{{"rounds", c.rounds},
           {"therapy_temperature", c.therapy_temperature},
           {"critic_temperature", c.critic_temperature},
           {"parse_retries", c.parse_retries}};
}

void from_json(const Json& j, OrchestrationConfig& c) {
  OrchestrationConfig d;
  c.rounds = j.value("rounds", d.rounds);
  c.therapy_temperature = j.value("therapy_temperature", d.therapy_temperature);
  c.critic_temperature = j.value("critic_temperature", d.critic_temperature);
  c.parse_retries = j.value("parse_retries", d.parse_retries);
}

}  // namespace fluency::orchestrator

namespace fluency::review {

void to_json(Json& j, const ReviewState& s) {
  j = Json{{"phase", std::string(to_string(s.phase))},
           {"modification_count", s.modification_count},
           {"max_modifications", s.max_modifications}};
}

void from_json(const Json& j, ReviewState& s) {
  auto phase = review_phase_from_string(j.at("phase").get<std::string>());
  if (!phase) throw Error(ErrorCode::InvalidInput, "unknown review phase");
  s.phase = *phase;
  s.modification_count = j.value("modification_count", 0);
  s.max_modifications = j.value("max_modifications", 1);
}

void to_json(Json& j, const AuditEntry& e) {
  j = Json{{"timestamp", format_timestamp(e.timestamp)},
           {"clinician_id", e.clinician_id},
           {"action", std::string(to_string(e.action))},
           {"resulting_state", std::string(to_string(e.resulting_state))}};
  if (e.feedback) j["feedback"] = *e.feedback;
}

void from_json(const Json& j, AuditEntry& e) {
  auto ts = parse_timestamp(j.at("timestamp").get<std::string>());
  auto action = action_from_string(j.at("action").get<std::string>());
  auto phase = review_phase_from_string(j.at("resulting_state").get<std::string>());
  if (!ts || !action || !phase) throw Error(ErrorCode::InvalidInput, "bad audit entry");
  e.timestamp = *ts;
  e.clinician_id = j.value("clinician_id", std::string{});
  e.action = *action;
  e.resulting_state = *phase;
  e.feedback.reset();
  if (auto it = j.find("feedback"); it != j.end() && it->is_string()) {
    e.feedback = it->get<std::string>();
  }
}

}  // namespace fluency::review

namespace fluency::segmenter {

void to_json(Json& j, const Window& w) { j = Json{{"start_s", w.start_s}, {"end_s", w.end_s}}; }

void from_json(const Json& j, Window& w) {
  w.start_s = j.at("start_s").get<double>();
  w.end_s = j.at("end_s").get<double>();
}

}  // namespace fluency::segmenter

namespace fluency::service {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view text, const std::array<Enum, N>& all) {
  for (auto e : all) {
    if (to_string(e) == text) return e;
  }
  return std::nullopt;
}

constexpr std::array<Lifecycle, 8> kAllLifecycles = {
    Lifecycle::Queued,        Lifecycle::Processing, Lifecycle::ResultsReady,
    Lifecycle::PendingReview, Lifecycle::Revising,   Lifecycle::Approved,
    Lifecycle::Rejected,      Lifecycle::Failed};

constexpr std::array<Stage, 7> kAllStages = {
    Stage::Segmenting, Stage::Classifying, Stage::Transcribing, Stage::Generating,
    Stage::Critiquing, Stage::Refining,    Stage::Exporting};

template <typename Enum, std::size_t N>
Enum required_enum(const Json& j, const char* key, const std::array<Enum, N>& all) {
  auto parsed = lookup(j.at(key).get<std::string>(), all);
  if (!parsed) throw Error(ErrorCode::InvalidInput, std::string("unknown ") + key);
  return *parsed;
}

Json chunk_record(const ChunkAnalysis& a) {
  Json j = {{"index", a.chunk_index},
            {"start_s", a.start_s},
            {"end_s", a.end_s},
            {"type", a.top_label},
            {"confidence", a.confidence},
            {"label_probs", Json(a).at("label_probs")}};
  if (a.transcript) j["transcript"] = *a.transcript;
  if (a.phonemes) j["phonemes"] = *a.phonemes;
  return j;
}

}  // namespace

std::string_view to_string(Mode mode) {
  return mode == Mode::Full ? "full" : "classification_only";
}

std::optional<Mode> mode_from_string(std::string_view text) {
  if (text == "full") return Mode::Full;
  if (text == "classification_only") return Mode::ClassificationOnly;
  return std::nullopt;
}

std::string_view to_string(Lifecycle l) {
  switch (l) {
    case Lifecycle::Queued: return "Queued";
    case Lifecycle::Processing: return "Processing";
    case Lifecycle::ResultsReady: return "ResultsReady";
    case Lifecycle::PendingReview: return "PendingReview";
    case Lifecycle::Revising: return "Revising";
    case Lifecycle::Approved: return "Approved";
    case Lifecycle::Rejected: return "Rejected";
    case Lifecycle::Failed: return "Failed";
  }
  return "Queued";
}

std::optional<Lifecycle> lifecycle_from_string(std::string_view text) {
  return lookup(text, kAllLifecycles);
}

bool has_results(Lifecycle l) {
  switch (l) {
    case Lifecycle::ResultsReady:
    case Lifecycle::PendingReview:
    case Lifecycle::Revising:
    case Lifecycle::Approved:
    case Lifecycle::Rejected:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Segmenting: return "segmenting";
    case Stage::Classifying: return "classifying";
    case Stage::Transcribing: return "transcribing";
    case Stage::Generating: return "generating";
    case Stage::Critiquing: return "critiquing";
    case Stage::Refining: return "refining";
    case Stage::Exporting: return "exporting";
  }
  return "segmenting";
}

std::optional<Stage> stage_from_string(std::string_view text) {
  return lookup(text, kAllStages);
}

void to_json(Json& j, const ProgressEvent& e) {
  j = Json{{"stage", std::string(to_string(e.stage))},
           {"progress", e.progress},
           {"message", e.message}};
}

void from_json(const Json& j, ProgressEvent& e) {
  e.stage = required_enum(j, "stage", kAllStages);
  e.progress = j.value("progress", 0.0);
  e.message = j.value("message", std::string{});
}

void to_json(Json& j, const SessionRecord& r) {
  j = Json{{"id", r.id},
           {"mode", std::string(to_string(r.mode))},
           {"lifecycle", std::string(to_string(r.lifecycle))},
           {"failure_reason", r.failure_reason},
           {"last_error", r.last_error},
           {"patient", r.patient},
           {"seg_config", r.seg_config},
           {"orch_config", r.orch_config},
           {"sample_rate_hz", r.sample_rate_hz},
           {"sample_count", r.sample_count},
           {"windows", r.windows},
           {"analyses", r.analyses},
           {"plan_degraded", r.plan_degraded},
           {"critic_texts", r.critic_texts},
           {"history", r.history},
           {"review", r.review},
           {"audit_log", r.audit_log},
           {"events", r.events},
           {"created_at", review::format_timestamp(r.created_at)}};
  j["classification"] = r.classification ? Json(*r.classification) : Json(nullptr);
  j["plan"] = r.plan ? Json(*r.plan) : Json(nullptr);
}

void from_json(const Json& j, SessionRecord& r) {
  r = SessionRecord{};
  r.id = j.at("id").get<std::string>();
  auto mode = mode_from_string(j.at("mode").get<std::string>());
  if (!mode) throw Error(ErrorCode::InvalidInput, "unknown mode");
  r.mode = *mode;
  r.lifecycle = required_enum(j, "lifecycle", kAllLifecycles);
  r.failure_reason = j.value("failure_reason", std::string{});
  r.last_error = j.value("last_error", std::string{});
  r.patient = j.at("patient").get<PatientProfile>();
  r.seg_config = j.at("seg_config").get<SegmentationConfig>();
  r.orch_config = j.at("orch_config").get<orchestrator::OrchestrationConfig>();
  r.sample_rate_hz = j.value("sample_rate_hz", 0);
  r.sample_count = j.value("sample_count", std::size_t{0});
  r.windows = j.value("windows", std::vector<segmenter::Window>{});
  r.analyses = j.value("analyses", std::vector<ChunkAnalysis>{});
  if (auto it = j.find("classification"); it != j.end() && !it->is_null()) {
    r.classification = it->get<OverallClassification>();
  }
  if (auto it = j.find("plan"); it != j.end() && !it->is_null()) {
    r.plan = it->get<TherapyPlan>();
  }
  r.plan_degraded = j.value("plan_degraded", false);
  r.critic_texts = j.value("critic_texts", std::vector<std::string>{});
  r.history = j.value("history", std::vector<GenerationRecord>{});
  r.review = j.at("review").get<review::ReviewState>();
  r.audit_log = j.value("audit_log", std::vector<review::AuditEntry>{});
  r.events = j.value("events", std::vector<ProgressEvent>{});
  auto created = review::parse_timestamp(j.value("created_at", std::string{}));
  if (created) r.created_at = *created;
}

Json status_document(const SessionRecord& r) {
  Json j = {{"sessionId", r.id}, {"lifecycle", std::string(to_string(r.lifecycle))}};
  if (const auto* e = r.latest_event()) {
    j["stage"] = std::string(to_string(e->stage));
    j["progress"] = e->progress;
    j["message"] = e->message;
  } else {
    j["stage"] = nullptr;
    j["progress"] = 0.0;
    j["message"] = "queued";
  }
  if (has_results(r.lifecycle) && r.lifecycle != Lifecycle::Revising) j["progress"] = 1.0;
  if (r.lifecycle == Lifecycle::Failed) j["reason"] = r.failure_reason;
  return j;
}

Json results_document(const SessionRecord& r) {
  Json summary = {{"duration_s", r.duration_s()},
                  {"sample_rate_hz", r.sample_rate_hz},
                  {"chunk_count", r.analyses.size()},
                  {"seg_config", r.seg_config}};
  Json distribution = Json::object();
  if (!r.analyses.empty()) {
    for (const auto& [label, f] : analysis::type_distribution(r.analyses)) {
      distribution[std::string(to_string(label))] = f;
    }
  }
  summary["type_distribution"] = std::move(distribution);

  Json chunks = Json::array();
  for (const auto& a : r.analyses) chunks.push_back(chunk_record(a));

  Json j = {{"sessionId", r.id},
            {"mode", std::string(to_string(r.mode))},
            {"lifecycle", std::string(to_string(r.lifecycle))},
            {"created_at", review::format_timestamp(r.created_at)},
            {"patient", r.patient},
            {"analysis_summary", std::move(summary)},
            {"chunks", std::move(chunks)},
            {"critic_texts", r.critic_texts},
            {"generation_history", r.history},
            {"audit_log", r.audit_log},
            {"review", r.review}};
  j["overall_classification"] =
      r.classification ? Json(*r.classification) : Json(nullptr);
  if (r.plan) {
    j["plan"] = *r.plan;
    j["plan_warnings"] = plan_warnings(*r.plan);
    j["urgent_flag"] = r.plan->urgent_flag;
  } else {
    j["plan"] = nullptr;
    j["plan_warnings"] = Json::array();
    j["urgent_flag"] = false;
  }
  j["plan_degraded"] = r.plan_degraded;
  if (!r.last_error.empty()) j["last_error"] = r.last_error;
  return j;
}

}  // namespace fluency::service
