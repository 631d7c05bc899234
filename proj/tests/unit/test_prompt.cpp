#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "fluency/core/serialize.hpp"
#include "fluency/prompt/render.hpp"
#include "fluency/prompt/templates.hpp"
#include "support/fixtures.hpp"

namespace fluency::prompt {
namespace {

using fluency::testing::load_plan;
using fluency::testing::sample_context;
using fluency::testing::thrown_code;
using fluency::testing::thrown_detail;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_placeholder(const std::string& text) {
  static const std::regex token(R"(\{[a-z_]+\})");
  return std::regex_search(text, token);
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

// Every template line without a placeholder must appear verbatim.
void expect_literal_lines(TemplateId id, const std::string& rendered) {
  std::istringstream in(TemplateSet::builtin().text(id));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || has_placeholder(line)) continue;
    EXPECT_NE(rendered.find(line), std::string::npos) << name(id) << ": " << line;
  }
}

TEST(Templates, BuiltinMatchesAssetFiles) {
  auto dir = fluency::testing::source_dir() / "templates";
  auto loaded = TemplateSet::load(dir);
  for (auto id : kAllTemplates) {
    std::string file = read_file(dir / (std::string(name(id)) + ".txt"));
    EXPECT_FALSE(file.empty()) << name(id);
    EXPECT_EQ(TemplateSet::builtin().text(id), file) << name(id);
    EXPECT_EQ(loaded.text(id), file) << name(id);
  }
}

TEST(Templates, LoadMissingDirIsBadConfig) {
  EXPECT_EQ(thrown_code([] { TemplateSet::load("/nonexistent/templates"); }),
            ErrorCode::BadConfig);
}

TEST(Substitute, TokensAndOptionalLines) {
  Bindings b{{"a", "X"}, {"b", std::nullopt}};
  EXPECT_EQ(substitute("one {a}\ntwo {b}\nthree", b), "one X\nthree");
  EXPECT_EQ(thrown_detail([&] { substitute("{missing}", b); }), "missing");
  // Values are not rescanned.
  EXPECT_EQ(substitute("{a}", Bindings{{"a", "{b}"}}), "{b}");
  // JSON braces in templates are not tokens.
  EXPECT_EQ(substitute("{\"k\": 1} {a}", b), "{\"k\": 1} X");
}

TEST(Locale, Lookup) {
  EXPECT_EQ(locale_description("en-US"), "English (United States)");
  EXPECT_EQ(locale_description("pt-PT"), "Portuguese (Portugal)");
  EXPECT_EQ(locale_description("xx-YY"), "xx-YY");
}

TEST(Format, Helpers) {
  EXPECT_EQ(format_percent(0.0), "0");
  EXPECT_EQ(format_percent(50.0), "50");
  EXPECT_EQ(format_percent(33.333), "33.3");
  LabelDistribution d{{StutterLabel::Block, 1.0 / 3}, {StutterLabel::Fluent, 2.0 / 3},
                      {StutterLabel::Prolongation, 0.0}};
  EXPECT_EQ(format_distribution(d), "Block 33.3%, Fluent 66.7%");
  EXPECT_EQ(format_correlation({{"s", 2.5}, {"f", 2.0}}), "/s/ (ratio 2.50), /f/ (ratio 2.00)");
}

TEST(TherapyPrompt, FullContext) {
  auto ctx = sample_context();
  auto p = render_therapy_prompt(ctx);
  EXPECT_NE(p.system.find("OUTPUT ONLY THE JSON OBJECT"), std::string::npos);
  EXPECT_NE(p.system.find("(English (United States))"), std::string::npos);
  EXPECT_NE(p.system.find(plan_schema_text()), std::string::npos);
  EXPECT_NE(p.human.find("ACOUSTIC PROFILE"), std::string::npos);
  EXPECT_NE(p.human.find("PER-CHUNK ANALYSIS"), std::string::npos);
  EXPECT_NE(p.human.find("PHONEME-DISFLUENCY CORRELATION"), std::string::npos);
  EXPECT_NE(p.human.find("- Type: Block"), std::string::npos);
  EXPECT_NE(p.human.find("- Transcription: we do not own a freshness"), std::string::npos);
  EXPECT_NE(p.human.find("- Locale: en-US"), std::string::npos);
  EXPECT_NE(p.human.find("34-year-old adult"), std::string::npos);
  EXPECT_FALSE(has_placeholder(p.system));
  EXPECT_FALSE(has_placeholder(p.human));
  expect_literal_lines(TemplateId::TherapySystem, p.system);
  expect_literal_lines(TemplateId::TherapyHuman, p.human);
}

TEST(TherapyPrompt, OptionalBlocksOmittedWholly) {
  auto ctx = sample_context();
  ctx.chunk_details.clear();
  ctx.phoneme_correlation.reset();
  auto p = render_therapy_prompt(ctx);
  EXPECT_EQ(p.human.find("PER-CHUNK ANALYSIS"), std::string::npos);
  EXPECT_EQ(p.human.find("ACOUSTIC PROFILE"), std::string::npos);
  EXPECT_EQ(p.human.find("PHONEME-DISFLUENCY"), std::string::npos);
  EXPECT_FALSE(has_placeholder(p.human));
}

TEST(TherapyPrompt, MissingContextNamesPlaceholder) {
  auto ctx = sample_context();
  ctx.schema_str.clear();
  EXPECT_EQ(thrown_code([&] { render_therapy_prompt(ctx); }), ErrorCode::MissingContext);
  EXPECT_EQ(thrown_detail([&] { render_therapy_prompt(ctx); }), "schema_str");
  ctx = sample_context();
  ctx.locale_desc = " ";
  EXPECT_EQ(thrown_detail([&] { render_therapy_prompt(ctx); }), "language_desc");
  ctx = sample_context();
  ctx.classification.reset();
  EXPECT_EQ(thrown_code([&] { render_therapy_prompt(ctx); }), ErrorCode::MissingContext);
}

TEST(CriticPrompt, EmbedsPlanAndDomains) {
  auto plan = load_plan("prolongation_1");
  auto ctx = sample_context();
  auto p = render_critic_prompt(plan, ctx);
  EXPECT_NE(p.human.find("THERAPY PLAN TO REVIEW: " + plan_json_text(plan)), std::string::npos);
  EXPECT_NE(p.human.find("- Primary Stuttering Type: Block"), std::string::npos);
  EXPECT_NE(p.human.find("- Stuttering Percentage: 50%"), std::string::npos);
  EXPECT_NE(p.human.find("/s/ (ratio 2.50)"), std::string::npos);
  for (const char* h : {"Clinical Soundness —", "Safety Concerns —", "Evidence Strength —",
                        "Improvements Needed —", "Structure and Clarity —",
                        "Explainability and Reasoning Transparency —"}) {
    EXPECT_EQ(count(p.human, h), 1u) << h;
  }
  EXPECT_FALSE(has_placeholder(p.human));
  expect_literal_lines(TemplateId::CriticSystem, p.system);
  expect_literal_lines(TemplateId::CriticHuman, p.human);
}

TEST(CriticPrompt, ZeroPercent) {
  auto ctx = sample_context();
  ctx.classification->stuttering_pct = 0.0;
  auto p = render_critic_prompt(load_plan("repetition_1"), ctx);
  EXPECT_NE(p.human.find("Stuttering Percentage: 0%"), std::string::npos);
}

TEST(RefinePrompt, EmbedsPlanAndFeedback) {
  auto plan = load_plan("silent_block_2");
  auto p = render_refinement_prompt(plan, "add evidence bases", sample_context());
  EXPECT_NE(p.human.find(plan_json_text(plan)), std::string::npos);
  EXPECT_NE(p.human.find("- CRITIC FEEDBACK: add evidence bases"), std::string::npos);
  EXPECT_NE(p.system.find("Address ALL points raised"), std::string::npos);
  EXPECT_NE(p.system.find("clinicalReasoning"), std::string::npos);
  EXPECT_FALSE(has_placeholder(p.human));
  expect_literal_lines(TemplateId::RefineSystem, p.system);
  EXPECT_EQ(thrown_detail([&] { render_refinement_prompt(plan, "", sample_context()); }),
            "critic_feedback");
}

TEST(RefinePrompt, CorrelationLineDroppedWhenAbsent) {
  auto ctx = sample_context();
  ctx.phoneme_correlation.reset();
  auto p = render_refinement_prompt(load_plan("silent_block_2"), "more drills", ctx);
  EXPECT_EQ(p.human.find("PHONEME-DISFLUENCY CORRELATION"), std::string::npos);
  EXPECT_NE(p.human.find("EXISTING THERAPY PLAN"), std::string::npos);
}

TEST(HumanRevision, EmbedsFeedbackAndPlan) {
  auto plan = load_plan("prolongation_2");
  auto text = render_human_revision_prompt(plan, "emphasise respiratory control", sample_context());
  EXPECT_NE(text.find("CLINICIAN FEEDBACK: emphasise respiratory control"), std::string::npos);
  EXPECT_NE(text.find(plan_json_text(plan)), std::string::npos);
  EXPECT_NE(text.find("Do NOT create a new plan from scratch"), std::string::npos);
  EXPECT_NE(text.find("- Stuttering Type: Block"), std::string::npos);
  EXPECT_FALSE(has_placeholder(text));
  expect_literal_lines(TemplateId::HumanRevision, text);
  auto req = render_human_revision_request(plan, "x", sample_context());
  EXPECT_EQ(req.system, render_refinement_prompt(plan, "x", sample_context()).system);
  EXPECT_NE(req.human.find("CLINICIAN FEEDBACK: x"), std::string::npos);
  EXPECT_EQ(thrown_code([&] { render_human_revision_prompt(plan, "  \n", sample_context()); }),
            ErrorCode::MissingContext);
}

TEST(Render, NoPlaceholdersOverRandomContexts) {
  std::mt19937 rng(8);
  auto plan = load_plan("interjection_1");
  const char* locales[] = {"en-US", "en-GB", "fr-FR", "pt-PT", "de-DE"};
  for (int trial = 0; trial < 100; ++trial) {
    auto ctx = sample_context();
    ctx.patient.locale = locales[rng() % 5];
    ctx.locale_desc = locale_description(ctx.patient.locale);
    if (rng() % 2) ctx.chunk_details.clear();
    if (rng() % 2) ctx.phoneme_correlation.reset();
    if (rng() % 2) ctx.classification->secondary_type.reset();
    if (rng() % 2) ctx.patient.goals.clear();
    // Braces in free-text values must not be mistaken for tokens.
    if (rng() % 2) ctx.patient.demographics = "likes {curly} braces";
    for (const auto& text :
         {render_therapy_prompt(ctx).human, render_therapy_prompt(ctx).system,
          render_critic_prompt(plan, ctx).human, render_refinement_prompt(plan, "f", ctx).human,
          render_human_revision_prompt(plan, "f", ctx)}) {
      std::string scrubbed = std::regex_replace(text, std::regex(R"(\{curly\})"), "");
      ASSERT_FALSE(has_placeholder(scrubbed)) << text.substr(0, 200);
    }
  }
}

TEST(Render, Deterministic) {
  auto ctx = sample_context();
  EXPECT_EQ(render_therapy_prompt(ctx).human, render_therapy_prompt(ctx).human);
  auto plan = load_plan("repetition_2");
  EXPECT_EQ(render_critic_prompt(plan, ctx).human, render_critic_prompt(plan, ctx).human);
}

}  // namespace
}  // namespace fluency::prompt
