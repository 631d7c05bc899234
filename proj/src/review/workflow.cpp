#include "fluency/review/workflow.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <ctime>

#include "fluency/core/error.hpp"

namespace fluency::review {

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

[[noreturn]] void invalid(std::string detail) {
  throw Error(ErrorCode::InvalidAction, std::move(detail));
}

}  // namespace

std::string_view to_string(ReviewPhase phase) {
  switch (phase) {
    case ReviewPhase::PendingReview: return "PendingReview";
    case ReviewPhase::Revising: return "Revising";
    case ReviewPhase::Approved: return "Approved";
    case ReviewPhase::Rejected: return "Rejected";
  }
  return "PendingReview";
}

std::optional<ReviewPhase> review_phase_from_string(std::string_view text) {
  for (auto p : kAllPhases) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Approve: return "approve";
    case ActionKind::Reject: return "reject";
    case ActionKind::Modify: return "modify";
  }
  return "approve";
}

std::optional<ActionKind> action_from_string(std::string_view text) {
  for (auto a : kAllActions) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

std::string_view to_string(Effect effect) {
  switch (effect) {
    case Effect::Finalize: return "finalize";
    case Effect::Terminate: return "terminate";
    case Effect::ScheduleRevision: return "schedule_revision";
  }
  return "finalize";
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto secs = floor<seconds>(t);
  const auto ms = (t - secs).count();
  const std::time_t tt = system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  int y, mo, d, h, mi, s, ms = 0;
  const std::string str(text);
  int n = std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ", &y, &mo, &d, &h,
                      &mi, &s, &ms);
  if (n < 6) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Timestamp{sys_days{ymd}.time_since_epoch() + hours{h} + minutes{mi} +
                   seconds{s} + milliseconds{ms}};
}

Timestamp now() {
  return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

Transition apply_review(const ReviewState& state, const ReviewAction& action,
                        const std::vector<Violation>& plan_violations) {
  if (is_terminal(state.phase)) invalid("terminal");
  if (state.phase != ReviewPhase::PendingReview) invalid("not pending");

  ReviewState next = state;
  switch (action.action) {
    case ActionKind::Approve:
      if (!plan_violations.empty()) invalid("plan invalid");
      next.phase = ReviewPhase::Approved;
      return {next, Effect::Finalize};
    case ActionKind::Reject:
      next.phase = ReviewPhase::Rejected;
      return {next, Effect::Terminate};
    case ActionKind::Modify:
      if (blank(action.feedback)) {
        throw Error(ErrorCode::MissingFeedback, "modify requires feedback");
      }
      if (state.modification_count >= state.max_modifications) {
        invalid("modification limit");
      }
      next.phase = ReviewPhase::Revising;
      ++next.modification_count;
      return {next, Effect::ScheduleRevision};
  }
  invalid("unknown action");
}

ReviewState revision_complete(const ReviewState& state) {
  if (state.phase != ReviewPhase::Revising) invalid("not revising");
  ReviewState next = state;
  next.phase = ReviewPhase::PendingReview;
  return next;
}

const AuditEntry& AuditLog::append(const ReviewAction& action, ReviewPhase resulting) {
  AuditEntry entry;
  entry.timestamp = action.timestamp;
  if (!entries_.empty()) {
    entry.timestamp = std::max(entry.timestamp, entries_.back().timestamp);
  }
  entry.clinician_id = action.clinician_id;
  entry.action = action.action;
  if (!blank(action.feedback)) entry.feedback = action.feedback;
  entry.resulting_state = resulting;
  entries_.push_back(std::move(entry));
  return entries_.back();
}

}  // namespace fluency::review
