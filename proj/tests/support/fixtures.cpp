#include "support/fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fluency/audio/wav.hpp"
#include "fluency/core/serialize.hpp"

namespace fluency::testing {

namespace fs = std::filesystem;

fs::path source_dir() { return FLUENCY_SOURCE_DIR; }

std::optional<ErrorCode> thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string thrown_detail(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.detail();
  }
  return {};
}

std::vector<std::string> plan_fixture_names() {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(source_dir() / "tests/fixtures/plans")) {
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

nlohmann::json load_plan_json(const std::string& name) {
  std::ifstream in(source_dir() / "tests/fixtures/plans" / (name + ".json"));
  if (!in) throw std::runtime_error("missing fixture " + name);
  return nlohmann::json::parse(in);
}

TherapyPlan load_plan(const std::string& name) {
  return load_plan_json(name).get<TherapyPlan>();
}

namespace {

void collect(const nlohmann::json& j, const nlohmann::json::json_pointer& ptr,
             const std::string& path, std::vector<PlanLeaf>& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      collect(value, ptr / key, path.empty() ? key : path + "." + key, out);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      collect(j[i], ptr / i, path + "[" + std::to_string(i) + "]", out);
    }
  } else if (j.is_string() && path != "primary_goal.rationale") {
    out.push_back({ptr, path});
  }
}

}  // namespace

std::vector<PlanLeaf> required_leaves(const nlohmann::json& plan) {
  std::vector<PlanLeaf> out;
  collect(plan, {}, "", out);
  return out;
}

AudioClip synth_clip(double seconds, int sample_rate_hz, std::uint64_t seed) {
  AudioClip clip;
  clip.sample_rate_hz = sample_rate_hz;
  auto n = static_cast<std::size_t>(std::llround(seconds * sample_rate_hz));
  clip.samples.resize(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 800.0);
  for (std::size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / sample_rate_hz;
    double v = 6000.0 * std::sin(2 * std::numbers::pi * 220.0 * t) + noise(rng);
    clip.samples[i] = static_cast<std::int16_t>(std::clamp(v, -32768.0, 32767.0));
  }
  return clip;
}

std::string synth_wav(double seconds, int sample_rate_hz, std::uint64_t seed) {
  auto clip = synth_clip(seconds, sample_rate_hz, seed);
  return audio::encode_wav(clip.samples, clip.sample_rate_hz);
}

std::string raw_wav(int channels, int bits, int sample_rate_hz, int frames) {
  auto u16 = [](std::string& s, int v) {
    s.push_back(static_cast<char>(v & 0xFF));
    s.push_back(static_cast<char>((v >> 8) & 0xFF));
  };
  auto u32 = [](std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  int block = channels * bits / 8;
  auto data = static_cast<std::uint32_t>(frames * block);
  std::string out = "RIFF";
  u32(out, 36 + data);
  out += "WAVEfmt ";
  u32(out, 16);
  u16(out, 1);
  u16(out, channels);
  u32(out, static_cast<std::uint32_t>(sample_rate_hz));
  u32(out, static_cast<std::uint32_t>(sample_rate_hz * block));
  u16(out, block);
  u16(out, bits);
  out += "data";
  u32(out, data);
  out.append(data, '\0');
  return out;
}

ChunkAnalysis make_analysis(int index, StutterLabel label, double confidence,
                            double start_s, double end_s) {
  ChunkAnalysis a;
  a.chunk_index = index;
  a.start_s = start_s;
  a.end_s = end_s;
  double rest = (1.0 - confidence) / 5.0;
  for (auto l : kAllLabels) a.label_probs[l] = l == label ? confidence : rest;
  a.top_label = label;
  a.confidence = confidence;
  return a;
}

AggregateOracle aggregate_oracle(const std::vector<ChunkAnalysis>& analyses) {
  struct Tally {
    StutterLabel label;
    int count = 0;
    double conf = 0.0;
  };
  std::vector<Tally> tallies;
  for (auto l : kAllLabels) {
    if (l != StutterLabel::Fluent) tallies.push_back({l});
  }
  int disfluent = 0;
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& a : analyses) {
    double dur = a.end_s - a.start_s;
    weighted += a.confidence * dur;
    total += dur;
    if (a.top_label == StutterLabel::Fluent) continue;
    ++disfluent;
    for (auto& t : tallies) {
      if (t.label == a.top_label) {
        ++t.count;
        t.conf += a.confidence;
      }
    }
  }
  std::stable_sort(tallies.begin(), tallies.end(), [](const Tally& x, const Tally& y) {
    if (x.count != y.count) return x.count > y.count;
    if (x.conf != y.conf) return x.conf > y.conf;
    return static_cast<int>(x.label) < static_cast<int>(y.label);
  });
  AggregateOracle o;
  if (tallies[0].count > 0) o.primary = tallies[0].label;
  if (tallies[1].count > 0) o.secondary = tallies[1].label;
  o.stuttering_pct = analyses.empty() ? 0.0 : 100.0 * disfluent / analyses.size();
  o.weighted_confidence = total > 0 ? weighted / total : 0.0;
  return o;
}

PatientProfile sample_patient() {
  PatientProfile p;
  p.demographics = "34-year-old adult";
  p.clinical_history = "Stuttering since age 5";
  p.therapy_background = "No prior therapy";
  p.goals = "Speak more easily at work";
  p.locale = "en-US";
  return p;
}

OverallClassification sample_classification() {
  OverallClassification c;
  c.primary_type = StutterLabel::Block;
  c.secondary_type = StutterLabel::Prolongation;
  c.weighted_confidence = 0.75;
  c.severity = Severity::Severe;
  c.stuttering_pct = 50.0;
  c.problematic_phonemes = {{"s", 2.5}};
  return c;
}

prompt::PromptContext sample_context() {
  auto a = make_analysis(0, StutterLabel::Block, 0.8, 0.0, 4.0);
  a.transcript = "we do not own";
  a.phonemes = std::vector<std::string>{"w", "i", "d", "u"};
  auto b = make_analysis(1, StutterLabel::Fluent, 0.7, 2.0, 6.0);
  b.transcript = "a freshness";
  b.phonemes = std::vector<std::string>{"f", "r", "e", "s"};
  return prompt::make_context(sample_patient(), sample_classification(), {a, b},
                              std::vector<PhonemeScore>{{"s", 2.5}});
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  std::ostringstream name;
  name << "fluency-test-" << rd() << "-" << counter++;
  path_ = fs::temp_directory_path() / name.str();
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

}  // namespace fluency::testing
