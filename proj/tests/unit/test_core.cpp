#include <random>

#include <gtest/gtest.h>

#include "fluency/core/error.hpp"
#include "fluency/core/plan.hpp"
#include "fluency/core/serialize.hpp"
#include "fluency/llm/chat.hpp"
#include "support/fixtures.hpp"

namespace fluency {
namespace {

using testing::load_plan;
using testing::load_plan_json;
using testing::plan_fixture_names;

TEST(Error, MessageCarriesCodeAndDetail) {
  Error e(ErrorCode::BadAudio, "channels=2");
  EXPECT_EQ(e.code(), ErrorCode::BadAudio);
  EXPECT_EQ(e.detail(), "channels=2");
  EXPECT_STREQ(e.what(), "BadAudio: channels=2");
}

TEST(Labels, StringRoundTrip) {
  for (auto l : kAllLabels) {
    EXPECT_EQ(label_from_string(to_string(l)), l);
  }
  EXPECT_FALSE(label_from_string("Stammer").has_value());
  EXPECT_EQ(display_name(StutterLabel::SoundRepetition), "Sound Repetition");
}

TEST(SegmentationConfig, AcceptsOnlyOfferedValues) {
  for (int d : {3, 4, 5}) {
    for (int k : {0, 25, 50, 75}) {
      auto c = SegmentationConfig::make(d, k);
      EXPECT_EQ(c.hop_centis(), d * (100 - k));
    }
  }
  try {
    SegmentationConfig::make(4, 30);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadConfig);
    EXPECT_NE(e.detail().find("overlap_pct=30"), std::string::npos);
  }
  EXPECT_THROW(SegmentationConfig::make(6, 50), Error);
}

TEST(Patient, LocaleAllowList) {
  PatientProfile p;
  p.locale = "pt-PT";
  EXPECT_NO_THROW(check_patient(p));
  p.locale = "xx-YY";
  EXPECT_THROW(check_patient(p), Error);
}

class FixturePlan : public ::testing::TestWithParam<std::string> {};

TEST_P(FixturePlan, ValidatesClean) {
  auto j = load_plan_json(GetParam());
  EXPECT_TRUE(validate_plan_json(j).empty());
  EXPECT_TRUE(validate_plan(j.get<TherapyPlan>()).empty());
}

TEST_P(FixturePlan, BlankingAnyLeafGivesOneEmptyField) {
  auto j = load_plan_json(GetParam());
  for (const auto& leaf : testing::required_leaves(j)) {
    auto m = j;
    m[leaf.pointer] = "   ";
    auto v = validate_plan_json(m);
    ASSERT_EQ(v.size(), 1u) << leaf.path;
    EXPECT_EQ(v[0].path, leaf.path);
    EXPECT_EQ(v[0].reason, ViolationReason::EmptyField);
  }
}

TEST_P(FixturePlan, RemovingAnyLeafGivesOneMissingField) {
  auto j = load_plan_json(GetParam());
  for (const auto& leaf : testing::required_leaves(j)) {
    auto m = j;
    m[leaf.pointer.parent_pointer()].erase(leaf.pointer.back());
    auto v = validate_plan_json(m);
    ASSERT_EQ(v.size(), 1u) << leaf.path;
    EXPECT_EQ(v[0].path, leaf.path);
    EXPECT_EQ(v[0].reason, ViolationReason::MissingField);
  }
}

TEST_P(FixturePlan, RoundTripsThroughStruct) {
  auto j = load_plan_json(GetParam());
  TherapyPlan p = j.get<TherapyPlan>();
  Json back = p;
  back.erase("urgent_flag");
  EXPECT_EQ(back, j);
  EXPECT_EQ(Json(p).get<TherapyPlan>(), p);
}

INSTANTIATE_TEST_SUITE_P(ReferencePlans, FixturePlan,
                         ::testing::ValuesIn(plan_fixture_names()));

TEST(Fixtures, AllEightPresent) {
  EXPECT_EQ(plan_fixture_names().size(), 8u);
}

TEST(ValidatePlan, EmptyStepsIsNoSteps) {
  auto j = load_plan_json("prolongation_1");
  j["steps"] = Json::array();
  auto v = validate_plan_json(j);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].reason, ViolationReason::NoSteps);
  EXPECT_EQ(v[0].path, "steps");
}

TEST(ValidatePlan, BlankEvidenceBasePath) {
  auto j = load_plan_json("prolongation_1");
  j["steps"][1]["strategies"][0]["clinical_reasoning"]["evidenceBase"] = "";
  auto v = validate_plan_json(j);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].path, "steps[1].strategies[0].clinical_reasoning.evidenceBase");
  EXPECT_EQ(to_string(v[0].reason), "empty_field");
}

TEST(ValidatePlan, MissingSectionIsOneViolation) {
  for (const char* key : {"explanation", "primary_goal", "steps"}) {
    auto j = load_plan_json("repetition_1");
    j.erase(key);
    auto v = validate_plan_json(j);
    ASSERT_EQ(v.size(), 1u) << key;
    EXPECT_EQ(v[0].path, key);
  }
}

TEST(ValidatePlan, ReportsEveryDefect) {
  auto j = load_plan_json("repetition_1");
  j["primary_goal"]["goal"] = "";
  j["steps"][0]["strategies"] = Json::array();
  j["steps"][1].erase("objective");
  EXPECT_EQ(validate_plan_json(j).size(), 3u);
  EXPECT_EQ(validate_plan_json(Json::array()).size(), 1u);
}

TEST(ValidatePlan, EmptyPlanIsInvalid) {
  EXPECT_FALSE(validate_plan(TherapyPlan{}).empty());
}

TEST(ValidatePlan, ValidImpliesAllReasoningFilled) {
  for (const auto& name : plan_fixture_names()) {
    auto p = load_plan(name);
    ASSERT_TRUE(validate_plan(p).empty());
    for (const auto& step : p.steps) {
      for (const auto& s : step.strategies) {
        EXPECT_FALSE(s.clinical_reasoning.observation.empty());
        EXPECT_FALSE(s.clinical_reasoning.clinicalRationale.empty());
        EXPECT_FALSE(s.clinical_reasoning.expectedOutcome.empty());
        EXPECT_FALSE(s.clinical_reasoning.evidenceBase.empty());
      }
    }
  }
}

TEST(PlanWarnings, RationaleAndLimitation) {
  auto p = load_plan("prolongation_1");
  auto w = plan_warnings(p);
  EXPECT_EQ(w.size(), 2u);
  p.primary_goal.rationale = "Tension drives the prolongations.";
  p.explanation.therapeutic_rationale += " IMPORTANT LIMITATION: decision support only.";
  EXPECT_TRUE(plan_warnings(p).empty());
}

TEST(RedFlag, ExactCaseSensitiveMatch) {
  EXPECT_FALSE(detect_red_flag(""));
  EXPECT_TRUE(detect_red_flag("x URGENT CLINICAL NOTE: Patient profile indicates serious"));
  EXPECT_FALSE(detect_red_flag("urgent clinical note"));
  EXPECT_FALSE(detect_red_flag("URGENT CLINICAL"));
}

TEST(RedFlag, MonotoneUnderConcatenation) {
  std::mt19937 rng(3);
  const std::string pieces[] = {"URGENT ", "CLINICAL ", "NOTE", "plan", " ", "URGENT CLINICAL NOTE"};
  for (int i = 0; i < 2000; ++i) {
    std::string a, b;
    for (int k = 0; k < 4; ++k) a += pieces[rng() % 6];
    for (int k = 0; k < 4; ++k) b += pieces[rng() % 6];
    if (detect_red_flag(a)) EXPECT_TRUE(detect_red_flag(a + b));
    if (detect_red_flag(b)) EXPECT_TRUE(detect_red_flag(a + b));
  }
}

TEST(RedFlag, PlanFlagFollowsText) {
  auto j = load_plan_json("silent_block_1");
  EXPECT_FALSE(j.get<TherapyPlan>().urgent_flag);
  j["explanation"]["patient_characteristics"] =
      "URGENT CLINICAL NOTE: Patient profile indicates serious concerns.";
  EXPECT_TRUE(j.get<TherapyPlan>().urgent_flag);
}

TEST(RenderPlanText, ContainsEveryField) {
  auto p = load_plan("interjection_2");
  auto text = render_plan_text(p);
  EXPECT_NE(text.find(p.primary_goal.goal), std::string::npos);
  for (const auto& step : p.steps) {
    EXPECT_NE(text.find(step.objective), std::string::npos);
    for (const auto& s : step.strategies) {
      EXPECT_NE(text.find(s.clinical_reasoning.evidenceBase), std::string::npos);
    }
  }
}

TEST(Schema, IsJsonWithPlanSections) {
  auto schema = Json::parse(plan_schema_text());
  auto dump = schema.dump();
  for (const char* key : {"explanation", "primary_goal", "steps", "clinical_reasoning",
                          "evidenceBase"}) {
    EXPECT_NE(dump.find(key), std::string::npos) << key;
  }
}

TEST(CriticText, BuiltinResponseHasSixDomains) {
  auto review = parse_critic_text(llm::builtin_critic_response(1));
  EXPECT_EQ(review.domains.size(), 6u);
  EXPECT_TRUE(validate_critic_review(review).empty());
  for (const auto& [d, r] : review.domains) {
    EXPECT_FALSE(r.observation.empty()) << to_string(d);
    EXPECT_FALSE(r.recommendations.empty()) << to_string(d);
  }
}

TEST(CriticText, MissingAndDuplicateDomains) {
  auto review = parse_critic_text(
      "- Clinical Soundness:\n  Observation: ok\n- Clinical Soundness:\n  Concerns: x\n");
  auto v = validate_critic_review(review);
  int missing = 0, dup = 0;
  for (const auto& x : v) {
    if (x.reason == ViolationReason::MissingField) ++missing;
    if (x.reason == ViolationReason::DuplicateDomain) ++dup;
  }
  EXPECT_EQ(missing, 5);
  EXPECT_EQ(dup, 1);
  Json j = review;
  EXPECT_EQ(j.get<CriticReview>(), review);
}

// Randomized round trips for the value types.
TEST(Serialize, RandomizedRoundTrips) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto word = [&] { return std::string(1 + rng() % 8, static_cast<char>('a' + rng() % 26)); };
  for (int i = 0; i < 200; ++i) {
    ChunkAnalysis a;
    a.chunk_index = static_cast<int>(rng() % 100);
    a.start_s = u(rng) * 10;
    a.end_s = a.start_s + 4;
    double total = 0;
    for (auto l : kAllLabels) total += a.label_probs[l] = u(rng);
    for (auto& [l, p] : a.label_probs) p /= total;
    assign_top_label(a);
    if (rng() % 2) a.transcript = word();
    if (rng() % 2) a.phonemes = std::vector<std::string>{word(), word()};
    EXPECT_EQ(Json(a).get<ChunkAnalysis>(), a);

    OverallClassification c;
    c.primary_type = kAllLabels[rng() % 6];
    if (rng() % 2) c.secondary_type = kAllLabels[rng() % 5];
    c.weighted_confidence = u(rng);
    c.severity = static_cast<Severity>(rng() % 3);
    c.stuttering_pct = 100 * u(rng);
    c.problematic_phonemes = {{word(), 2 + u(rng)}};
    EXPECT_EQ(Json(c).get<OverallClassification>(), c);

    PatientProfile p;
    p.demographics = word();
    p.goals = word();
    p.locale = "fr-FR";
    EXPECT_EQ(Json(p).get<PatientProfile>(), p);

    GenerationRecord r;
    r.round = i;
    r.role = static_cast<GenerationRole>(rng() % 4);
    r.prompt_system = word();
    r.raw_output = word();
    r.parsed_ok = rng() % 2;
    if (!r.parsed_ok) r.parse_error = word();
    EXPECT_EQ(Json(r).get<GenerationRecord>(), r);
  }
}

TEST(AssignTopLabel, TiesGoToEarliestLabel) {
  ChunkAnalysis a;
  for (auto l : kAllLabels) a.label_probs[l] = 0.1;
  a.label_probs[StutterLabel::Block] = 0.25;
  a.label_probs[StutterLabel::Interjection] = 0.25;
  assign_top_label(a);
  EXPECT_EQ(a.top_label, StutterLabel::Block);
  EXPECT_DOUBLE_EQ(a.confidence, 0.25);
}

}  // namespace
}  // namespace fluency
