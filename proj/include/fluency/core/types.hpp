#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fluency {

// Declaration order is the tie-break order used everywhere a "first label
// wins" rule applies.
enum class StutterLabel : std::uint8_t {
  Prolongation,
  Block,
  SoundRepetition,
  WordRepetition,
  Interjection,
  Fluent,
};

inline constexpr std::array<StutterLabel, 6> kAllLabels = {
    StutterLabel::Prolongation,   StutterLabel::Block,
    StutterLabel::SoundRepetition, StutterLabel::WordRepetition,
    StutterLabel::Interjection,   StutterLabel::Fluent,
};

std::string_view to_string(StutterLabel label);
std::optional<StutterLabel> label_from_string(std::string_view text);
/// Human wording ("Sound Repetition") used in prompts and exports.
std::string_view display_name(StutterLabel label);

inline bool is_disfluent(StutterLabel label) {
  return label != StutterLabel::Fluent;
}

using LabelDistribution = std::map<StutterLabel, double>;

enum class Severity : std::uint8_t { Mild, Moderate, Severe };

std::string_view to_string(Severity severity);
std::optional<Severity> severity_from_string(std::string_view text);

/// Window length and overlap as offered to clinicians: duration in {3,4,5}
/// seconds, overlap in {0,25,50,75} percent.
class SegmentationConfig {
 public:
  SegmentationConfig() = default;

  /// Throws Error(BadConfig) for values outside the allowed sets.
  static SegmentationConfig make(int duration_s, int overlap_pct);

  int duration_s() const { return duration_s_; }
  int overlap_pct() const { return overlap_pct_; }
  /// Hop in hundredths of a second; exact for every allowed combination.
  int hop_centis() const { return duration_s_ * (100 - overlap_pct_); }
  double hop_s() const { return hop_centis() / 100.0; }

  static std::span<const int> allowed_durations();
  static std::span<const int> allowed_overlaps();

  friend bool operator==(const SegmentationConfig&,
                         const SegmentationConfig&) = default;

 private:
  SegmentationConfig(int duration_s, int overlap_pct)
      : duration_s_(duration_s), overlap_pct_(overlap_pct) {}

  int duration_s_ = 4;
  int overlap_pct_ = 50;
};

struct AudioClip {
  std::vector<std::int16_t> samples;
  int sample_rate_hz = 16000;

  double duration_s() const {
    return sample_rate_hz > 0
               ? static_cast<double>(samples.size()) / sample_rate_hz
               : 0.0;
  }
};

struct Chunk {
  int index = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  std::vector<std::int16_t> samples;
  int sample_rate_hz = 16000;
  // Samples at or after this offset are digital-silence padding.
  std::size_t valid_samples = 0;

  bool padded() const { return valid_samples < samples.size(); }
};

struct ChunkAnalysis {
  int chunk_index = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  LabelDistribution label_probs;
  StutterLabel top_label = StutterLabel::Fluent;
  double confidence = 0.0;
  std::optional<std::string> transcript;
  std::optional<std::vector<std::string>> phonemes;

  friend bool operator==(const ChunkAnalysis&, const ChunkAnalysis&) = default;
};

/// Fills top_label and confidence from label_probs (ties resolve to the
/// earliest label in declaration order).
void assign_top_label(ChunkAnalysis& analysis);

struct PhonemeScore {
  std::string phoneme;
  double ratio = 0.0;

  friend bool operator==(const PhonemeScore&, const PhonemeScore&) = default;
};

struct OverallClassification {
  StutterLabel primary_type = StutterLabel::Fluent;
  std::optional<StutterLabel> secondary_type;
  double weighted_confidence = 0.0;
  Severity severity = Severity::Mild;
  double stuttering_pct = 0.0;
  std::vector<PhonemeScore> problematic_phonemes;

  friend bool operator==(const OverallClassification&,
                         const OverallClassification&) = default;
};

struct PatientProfile {
  std::string demographics;
  std::string clinical_history;
  std::string therapy_background;
  std::string goals;
  std::string locale = "en-US";

  friend bool operator==(const PatientProfile&, const PatientProfile&) = default;
};

/// Locales accepted for PatientProfile::locale.
std::span<const std::string_view> supported_locales();
bool is_supported_locale(std::string_view tag);
/// Throws Error(BadConfig) when the locale is not on the allow-list.
void check_patient(const PatientProfile& patient);

}  // namespace fluency
