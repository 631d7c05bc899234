#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluency/core/plan.hpp"

namespace fluency::review {

enum class ReviewPhase { PendingReview, Revising, Approved, Rejected };

inline constexpr std::array<ReviewPhase, 4> kAllPhases = {
    ReviewPhase::PendingReview, ReviewPhase::Revising, ReviewPhase::Approved,
    ReviewPhase::Rejected};

std::string_view to_string(ReviewPhase phase);
std::optional<ReviewPhase> review_phase_from_string(std::string_view text);

inline bool is_terminal(ReviewPhase phase) {
  return phase == ReviewPhase::Approved || phase == ReviewPhase::Rejected;
}

struct ReviewState {
  ReviewPhase phase = ReviewPhase::PendingReview;
  int modification_count = 0;
  int max_modifications = 1;

  friend bool operator==(const ReviewState&, const ReviewState&) = default;
};

enum class ActionKind { Approve, Reject, Modify };

inline constexpr std::array<ActionKind, 3> kAllActions = {
    ActionKind::Approve, ActionKind::Reject, ActionKind::Modify};

std::string_view to_string(ActionKind kind);
std::optional<ActionKind> action_from_string(std::string_view text);

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// ISO-8601 UTC with millisecond precision, e.g. 2026-03-01T09:15:00.000Z.
std::string format_timestamp(Timestamp t);
std::optional<Timestamp> parse_timestamp(std::string_view text);
Timestamp now();

struct ReviewAction {
  ActionKind action = ActionKind::Approve;
  std::string feedback;  // required for Modify
  std::string clinician_id;
  Timestamp timestamp{};
};

enum class Effect { Finalize, Terminate, ScheduleRevision };

std::string_view to_string(Effect effect);

struct Transition {
  ReviewState state;
  Effect effect;
};

/// Clinician decision on a plan awaiting review.
///   approve -> Approved (Finalize), only if plan_violations is empty
///   reject  -> Rejected (Terminate)
///   modify  -> Revising with count + 1 (ScheduleRevision), while count < max
/// Throws Error(InvalidAction) with detail "terminal", "not pending",
/// "modification limit" or "plan invalid"; Error(MissingFeedback) for a modify
/// without feedback.
Transition apply_review(const ReviewState& state, const ReviewAction& action,
                        const std::vector<Violation>& plan_violations = {});

/// Revising -> PendingReview once the revision finished. Throws
/// Error(InvalidAction, "not revising") otherwise.
ReviewState revision_complete(const ReviewState& state);

struct AuditEntry {
  Timestamp timestamp{};
  std::string clinician_id;
  ActionKind action = ActionKind::Approve;
  std::optional<std::string> feedback;
  ReviewPhase resulting_state = ReviewPhase::PendingReview;

  friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

/// Append-only audit trail. Timestamps are clamped so that they never
/// decrease, whatever the clinician's clock said.
class AuditLog {
 public:
  AuditLog() = default;
  explicit AuditLog(std::vector<AuditEntry> entries) : entries_(std::move(entries)) {}

  const AuditEntry& append(const ReviewAction& action, ReviewPhase resulting);
  const std::vector<AuditEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<AuditEntry> entries_;
};

}  // namespace fluency::review
