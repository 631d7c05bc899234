#include "fluency/core/types.hpp"

#include <algorithm>

#include "fluency/core/error.hpp"

namespace fluency {

namespace {

constexpr std::array<int, 3> kDurations = {3, 4, 5};
constexpr std::array<int, 4> kOverlaps = {0, 25, 50, 75};
constexpr std::array<std::string_view, 5> kLocales = {
    "en-US", "en-GB", "fr-FR", "pt-PT", "de-DE"};

}  // namespace

std::string_view to_string(StutterLabel label) {
  switch (label) {
    case StutterLabel::Prolongation: return "Prolongation";
    case StutterLabel::Block: return "Block";
    case StutterLabel::SoundRepetition: return "SoundRepetition";
    case StutterLabel::WordRepetition: return "WordRepetition";
    case StutterLabel::Interjection: return "Interjection";
    case StutterLabel::Fluent: return "Fluent";
  }
  return "Fluent";
}

std::optional<StutterLabel> label_from_string(std::string_view text) {
  for (auto label : kAllLabels) {
    if (to_string(label) == text) return label;
  }
  return std::nullopt;
}

std::string_view display_name(StutterLabel label) {
  switch (label) {
    case StutterLabel::SoundRepetition: return "Sound Repetition";
    case StutterLabel::WordRepetition: return "Word Repetition";
    default: return to_string(label);
  }
}

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::Mild: return "Mild";
    case Severity::Moderate: return "Moderate";
    case Severity::Severe: return "Severe";
  }
  return "Mild";
}

std::optional<Severity> severity_from_string(std::string_view text) {
  for (auto s : {Severity::Mild, Severity::Moderate, Severity::Severe}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

SegmentationConfig SegmentationConfig::make(int duration_s, int overlap_pct) {
  if (std::find(kDurations.begin(), kDurations.end(), duration_s) ==
      kDurations.end()) {
    throw Error(ErrorCode::BadConfig,
                "duration_s=" + std::to_string(duration_s) +
                    " (allowed: 3, 4, 5)");
  }
  if (std::find(kOverlaps.begin(), kOverlaps.end(), overlap_pct) ==
      kOverlaps.end()) {
    throw Error(ErrorCode::BadConfig,
                "overlap_pct=" + std::to_string(overlap_pct) +
                    " (allowed: 0, 25, 50, 75)");
  }
  return SegmentationConfig(duration_s, overlap_pct);
}

std::span<const int> SegmentationConfig::allowed_durations() {
  return kDurations;
}

std::span<const int> SegmentationConfig::allowed_overlaps() {
  return kOverlaps;
}

void assign_top_label(ChunkAnalysis& analysis) {
  analysis.top_label = StutterLabel::Fluent;
  analysis.confidence = -1.0;
  for (auto label : kAllLabels) {
    auto it = analysis.label_probs.find(label);
    double p = it == analysis.label_probs.end() ? 0.0 : it->second;
    if (p > analysis.confidence) {
      analysis.confidence = p;
      analysis.top_label = label;
    }
  }
}

std::span<const std::string_view> supported_locales() { return kLocales; }

bool is_supported_locale(std::string_view tag) {
  return std::find(kLocales.begin(), kLocales.end(), tag) != kLocales.end();
}

void check_patient(const PatientProfile& patient) {
  if (!is_supported_locale(patient.locale)) {
    throw Error(ErrorCode::BadConfig, "locale=" + patient.locale);
  }
}

}  // namespace fluency
