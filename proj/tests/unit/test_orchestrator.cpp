#include <gtest/gtest.h>

#include "fluency/core/serialize.hpp"
#include "fluency/orchestrator/loop.hpp"
#include "support/fixtures.hpp"

namespace fluency::orchestrator {
namespace {

using fluency::testing::load_plan;
using fluency::testing::load_plan_json;
using fluency::testing::sample_context;
using fluency::testing::thrown_code;
using fluency::testing::thrown_detail;
using llm::AgentTag;
using llm::ScriptedChatBackend;

OrchestrationConfig rounds(int n) {
  OrchestrationConfig c;
  c.rounds = n;
  return c;
}

std::vector<GenerationRole> roles(const LoopResult& r) {
  std::vector<GenerationRole> out;
  for (const auto& h : r.history) out.push_back(h.role);
  return out;
}

TEST(ParsePlan, FencedFixture) {
  auto text = "```json\n" + load_plan_json("prolongation_1").dump(2) + "\n```";
  EXPECT_EQ(parse_plan_output(text), load_plan("prolongation_1"));
  EXPECT_EQ(parse_plan_output("```\n" + load_plan_json("repetition_1").dump() + "\n```"),
            load_plan("repetition_1"));
}

TEST(ParsePlan, SyntaxAndSchemaFailures) {
  EXPECT_EQ(thrown_code([] { parse_plan_output("not json"); }), ErrorCode::ParseFailure);
  EXPECT_EQ(thrown_detail([] { parse_plan_output("not json"); }).rfind("syntax", 0), 0u);
  auto j = load_plan_json("prolongation_1");
  j.erase("primary_goal");
  auto detail = thrown_detail([&] { parse_plan_output(j.dump()); });
  EXPECT_EQ(detail.rfind("schema: primary_goal", 0), 0u) << detail;
}

TEST(ParsePlan, CamelCaseReasoningKeyAccepted) {
  auto j = load_plan_json("silent_block_1");
  for (auto& step : j["steps"]) {
    for (auto& s : step["strategies"]) {
      s["clinicalReasoning"] = s["clinical_reasoning"];
      s.erase("clinical_reasoning");
    }
  }
  EXPECT_EQ(parse_plan_output(j.dump()), load_plan("silent_block_1"));
}

TEST(Config, Bounds) {
  EXPECT_NO_THROW(rounds(5).check());
  EXPECT_EQ(thrown_code([] { rounds(6).check(); }), ErrorCode::BadConfig);
  EXPECT_EQ(thrown_code([] { rounds(-1).check(); }), ErrorCode::BadConfig);
  OrchestrationConfig c;
  c.critic_temperature = 2.5;
  EXPECT_EQ(thrown_code([&] { c.check(); }), ErrorCode::BadConfig);
}

TEST(RunLoop, ZeroRounds) {
  ScriptedChatBackend b;
  auto r = run_loop(sample_context(), rounds(0), b);
  EXPECT_EQ(r.history.size(), 1u);
  EXPECT_EQ(b.calls(), 1);
  EXPECT_EQ(r.final_plan, parse_plan_output(r.history[0].raw_output));
  EXPECT_FALSE(r.degraded());
}

TEST(RunLoop, TwoRoundsShape) {
  ScriptedChatBackend b;
  auto r = run_loop(sample_context(), rounds(2), b);
  EXPECT_EQ(roles(r), (std::vector<GenerationRole>{
                          GenerationRole::TherapyInitial, GenerationRole::Critic,
                          GenerationRole::Refine, GenerationRole::Critic, GenerationRole::Refine}));
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    EXPECT_EQ(r.history[i].round, static_cast<int>(i));
    EXPECT_TRUE(r.history[i].parsed_ok);
    EXPECT_FALSE(r.history[i].prompt_system.empty());
    EXPECT_FALSE(r.history[i].prompt_human.empty());
  }
  EXPECT_EQ(r.critic_texts.size(), 2u);
  EXPECT_TRUE(validate_plan(r.final_plan).empty());
  EXPECT_EQ(r.final_plan, parse_plan_output(r.history.back().raw_output));
}

TEST(RunLoop, TemperaturesAndKeys) {
  ScriptedChatBackend b;
  LoopOptions opts;
  opts.session_id = "abc";
  run_loop(sample_context(), rounds(2), b, opts);
  auto reqs = b.requests();
  ASSERT_EQ(reqs.size(), 5u);
  EXPECT_EQ(reqs[0].tag, AgentTag::Therapy);
  EXPECT_DOUBLE_EQ(reqs[0].temperature, 0.3);
  EXPECT_EQ(reqs[1].tag, AgentTag::Critic);
  EXPECT_DOUBLE_EQ(reqs[1].temperature, 0.0);
  EXPECT_EQ(reqs[1].round, 1);
  EXPECT_EQ(reqs[4].tag, AgentTag::Refine);
  EXPECT_EQ(reqs[4].round, 2);
  for (const auto& r : reqs) EXPECT_EQ(r.session_id, "abc");
}

TEST(RunLoop, CriticFeedbackFlowsIntoRefinement) {
  auto initial = load_plan_json("prolongation_1");
  initial["steps"][0]["strategies"][0]["clinical_reasoning"]["evidenceBase"] = "";
  auto fixed = load_plan_json("prolongation_1");
  ScriptedChatBackend b;
  b.script_sequence(AgentTag::Therapy, 0, {initial.dump(), fixed.dump()});
  b.script(AgentTag::Critic, 1, "evidenceBase missing in strategy 1");
  b.script(AgentTag::Refine, 1, fixed.dump());
  auto r = run_loop(sample_context(), rounds(1), b);
  // Initial attempt fails schema, the retry succeeds.
  ASSERT_EQ(r.history.size(), 4u);
  EXPECT_FALSE(r.history[0].parsed_ok);
  EXPECT_NE(r.history[0].parse_error.find("evidenceBase"), std::string::npos);
  EXPECT_NE(r.history[1].prompt_human.find("COULD NOT BE USED"), std::string::npos);
  EXPECT_NE(r.history[3].prompt_human.find("evidenceBase missing in strategy 1"),
            std::string::npos);
  EXPECT_EQ(r.final_plan, load_plan("prolongation_1"));
}

TEST(RunLoop, GarbageExhaustsRetries) {
  ScriptedChatBackend b;
  b.script(AgentTag::Therapy, 0, "garbage");
  try {
    run_loop(sample_context(), rounds(2), b);
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.code(), ErrorCode::GenerationFailed);
    EXPECT_EQ(e.history().size(), 3u);
    for (const auto& h : e.history()) EXPECT_FALSE(h.parsed_ok);
  }
  EXPECT_EQ(b.calls(), 3);
}

TEST(RunLoop, RefinementFailureKeepsLastGoodPlan) {
  ScriptedChatBackend b;
  b.script(AgentTag::Refine, 2, "{}");
  auto r = run_loop(sample_context(), rounds(3), b);
  ASSERT_TRUE(r.degraded());
  EXPECT_EQ(*r.failed_round, 2);
  EXPECT_TRUE(validate_plan(r.final_plan).empty());
  // initial, c1, r1, c2, r2 x3 attempts; round 3 is not attempted.
  EXPECT_EQ(r.history.size(), 7u);
  EXPECT_EQ(r.final_plan, parse_plan_output(r.history[2].raw_output));
}

TEST(RunLoop, RedFlagFromFinalPlan) {
  auto j = load_plan_json("interjection_1");
  j["explanation"]["therapeutic_rationale"] =
      "URGENT CLINICAL NOTE: Patient profile indicates serious concerns.";
  ScriptedChatBackend b;
  b.script(AgentTag::Therapy, 0, j.dump());
  auto r = run_loop(sample_context(), rounds(0), b);
  EXPECT_TRUE(r.red_flag);
  EXPECT_TRUE(r.final_plan.urgent_flag);
}

TEST(RunLoop, ProgressCallbacks) {
  ScriptedChatBackend b;
  std::vector<std::pair<LoopStage, int>> seen;
  LoopOptions opts;
  opts.on_progress = [&](LoopStage s, int round) { seen.emplace_back(s, round); };
  run_loop(sample_context(), rounds(1), b, opts);
  EXPECT_EQ(seen, (std::vector<std::pair<LoopStage, int>>{{LoopStage::Generating, 0},
                                                          {LoopStage::Critiquing, 1},
                                                          {LoopStage::Refining, 1}}));
}

TEST(RunLoop, Reproducible) {
  ScriptedChatBackend a(3), b(3);
  auto ra = run_loop(sample_context(), rounds(2), a);
  auto rb = run_loop(sample_context(), rounds(2), b);
  EXPECT_EQ(ra.history, rb.history);
}

TEST(HumanRevision, OneRecord) {
  ScriptedChatBackend b;
  auto plan = load_plan("silent_block_2");
  auto r = apply_human_revision(plan, "prioritise desensitization", sample_context(), {}, b, 5);
  ASSERT_EQ(r.history.size(), 1u);
  EXPECT_EQ(r.history[0].role, GenerationRole::HumanRevision);
  EXPECT_EQ(r.history[0].round, 5);
  EXPECT_NE(r.history[0].prompt_human.find("CLINICIAN FEEDBACK: prioritise desensitization"),
            std::string::npos);
  EXPECT_TRUE(validate_plan(r.final_plan).empty());
  auto req = b.requests().at(0);
  EXPECT_EQ(req.tag, AgentTag::HumanRevision);
  EXPECT_EQ(req.round, 1);
}

TEST(HumanRevision, RetriesThenSucceeds) {
  ScriptedChatBackend b;
  b.script_sequence(AgentTag::HumanRevision, 1,
                    {"nope", "still nope", load_plan_json("repetition_2").dump()});
  auto r = apply_human_revision(load_plan("repetition_1"), "x", sample_context(), {}, b, 0);
  ASSERT_EQ(r.history.size(), 3u);
  EXPECT_FALSE(r.history[0].parsed_ok);
  EXPECT_FALSE(r.history[1].parsed_ok);
  EXPECT_TRUE(r.history[2].parsed_ok);
  EXPECT_EQ(r.final_plan, load_plan("repetition_2"));
}

TEST(HumanRevision, Failures) {
  ScriptedChatBackend b;
  auto plan = load_plan("repetition_1");
  EXPECT_EQ(thrown_code([&] { apply_human_revision(plan, " ", sample_context(), {}, b, 0); }),
            ErrorCode::MissingContext);
  b.script(AgentTag::HumanRevision, 1, "garbage");
  EXPECT_EQ(thrown_code([&] { apply_human_revision(plan, "x", sample_context(), {}, b, 0); }),
            ErrorCode::RefinementFailed);
}

}  // namespace
}  // namespace fluency::orchestrator
