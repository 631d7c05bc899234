#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fluency/core/plan.hpp"
#include "fluency/core/types.hpp"
#include "fluency/orchestrator/loop.hpp"
#include "fluency/review/workflow.hpp"
#include "fluency/segmenter/segmenter.hpp"

namespace fluency::service {

enum class Mode { ClassificationOnly, Full };

std::string_view to_string(Mode mode);
std::optional<Mode> mode_from_string(std::string_view text);

enum class Lifecycle {
  Queued,
  Processing,
  ResultsReady,
  PendingReview,
  Revising,
  Approved,
  Rejected,
  Failed,
};

std::string_view to_string(Lifecycle lifecycle);
std::optional<Lifecycle> lifecycle_from_string(std::string_view text);

/// States in which a worker owns the session.
inline bool is_busy(Lifecycle l) {
  return l == Lifecycle::Queued || l == Lifecycle::Processing || l == Lifecycle::Revising;
}

/// Results (classification at least) are available.
bool has_results(Lifecycle l);

// Pipeline order.
enum class Stage {
  Segmenting,
  Classifying,
  Transcribing,
  Generating,
  Critiquing,
  Refining,
  Exporting,
};

std::string_view to_string(Stage stage);
std::optional<Stage> stage_from_string(std::string_view text);

struct ProgressEvent {
  Stage stage = Stage::Segmenting;
  double progress = 0.0;  // [0, 1]
  std::string message;

  friend bool operator==(const ProgressEvent&, const ProgressEvent&) = default;
};

struct SessionRecord {
  std::string id;
  Mode mode = Mode::Full;
  Lifecycle lifecycle = Lifecycle::Queued;
  std::string failure_reason;  // set with Lifecycle::Failed
  std::string last_error;      // non-fatal, e.g. a failed revision

  PatientProfile patient;
  SegmentationConfig seg_config;
  orchestrator::OrchestrationConfig orch_config;

  int sample_rate_hz = 0;
  std::size_t sample_count = 0;
  std::vector<segmenter::Window> windows;
  std::vector<ChunkAnalysis> analyses;
  std::optional<OverallClassification> classification;

  std::optional<TherapyPlan> plan;
  bool plan_degraded = false;
  std::vector<std::string> critic_texts;
  std::vector<GenerationRecord> history;

  review::ReviewState review;
  std::vector<review::AuditEntry> audit_log;
  std::vector<ProgressEvent> events;

  review::Timestamp created_at{};

  double duration_s() const {
    return sample_rate_hz > 0 ? static_cast<double>(sample_count) / sample_rate_hz : 0.0;
  }
  const ProgressEvent* latest_event() const {
    return events.empty() ? nullptr : &events.back();
  }

  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

void to_json(nlohmann::json& j, const SessionRecord& record);
void from_json(const nlohmann::json& j, SessionRecord& record);

void to_json(nlohmann::json& j, const ProgressEvent& event);
void from_json(const nlohmann::json& j, ProgressEvent& event);

/// {sessionId, lifecycle, stage, progress, message[, reason]}.
nlohmann::json status_document(const SessionRecord& record);

/// The full results document: analysis summary, overall classification,
/// per-chunk records, plan, critic texts, generation history and audit log.
nlohmann::json results_document(const SessionRecord& record);

}  // namespace fluency::service

namespace fluency::orchestrator {
void to_json(nlohmann::json& j, const OrchestrationConfig& config);
void from_json(const nlohmann::json& j, OrchestrationConfig& config);
}  // namespace fluency::orchestrator

namespace fluency::review {
void to_json(nlohmann::json& j, const ReviewState& state);
void from_json(const nlohmann::json& j, ReviewState& state);
void to_json(nlohmann::json& j, const AuditEntry& entry);
void from_json(const nlohmann::json& j, AuditEntry& entry);
}  // namespace fluency::review

namespace fluency::segmenter {
void to_json(nlohmann::json& j, const Window& window);
void from_json(const nlohmann::json& j, Window& window);
}  // namespace fluency::segmenter
