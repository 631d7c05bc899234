#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fluency/core/error.hpp"
#include "fluency/core/plan.hpp"
#include "fluency/core/types.hpp"
#include "fluency/prompt/render.hpp"

namespace fluency::testing {

std::filesystem::path source_dir();

/// Code of the fluency::Error thrown by fn; nullopt when nothing is thrown.
std::optional<ErrorCode> thrown_code(const std::function<void()>& fn);
std::string thrown_detail(const std::function<void()>& fn);

/// Stems of tests/fixtures/plans/*.json, sorted.
std::vector<std::string> plan_fixture_names();
nlohmann::json load_plan_json(const std::string& name);
TherapyPlan load_plan(const std::string& name);

/// Every mandatory string leaf of a plan document as (JSON pointer, dotted
/// path such as "steps[1].strategies[0].name"). Optional fields are skipped.
struct PlanLeaf {
  nlohmann::json::json_pointer pointer;
  std::string path;
};
std::vector<PlanLeaf> required_leaves(const nlohmann::json& plan);

/// Noise plus a 220 Hz tone so that every chunk hashes differently.
AudioClip synth_clip(double seconds, int sample_rate_hz = 16000,
                     std::uint64_t seed = 1);
std::string synth_wav(double seconds, int sample_rate_hz = 16000,
                      std::uint64_t seed = 1);
/// Arbitrary channel count / bit depth header, for rejection tests.
std::string raw_wav(int channels, int bits, int sample_rate_hz, int frames);

ChunkAnalysis make_analysis(int index, StutterLabel label, double confidence,
                            double start_s = 0.0, double end_s = 4.0);

/// Independent count-and-sort reference for aggregate(): counts non-Fluent
/// top labels, orders by (count desc, summed confidence desc, label order).
struct AggregateOracle {
  StutterLabel primary = StutterLabel::Fluent;
  std::optional<StutterLabel> secondary;
  double stuttering_pct = 0.0;
  double weighted_confidence = 0.0;
};
AggregateOracle aggregate_oracle(const std::vector<ChunkAnalysis>& analyses);

PatientProfile sample_patient();
OverallClassification sample_classification();
/// Full context: patient, classification, two chunks with phonemes and a
/// correlation list.
prompt::PromptContext sample_context();

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fluency::testing
