// Python bindings. Structured values cross the boundary as canonical JSON
// text; the fluency package decodes them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fluency/analysis/aggregate.hpp"
#include "fluency/core/error.hpp"
#include "fluency/core/serialize.hpp"
#include "fluency/llm/chat.hpp"
#include "fluency/llm/softmax.hpp"
#include "fluency/orchestrator/loop.hpp"
#include "fluency/prompt/render.hpp"
#include "fluency/review/workflow.hpp"
#include "fluency/segmenter/segmenter.hpp"
#include "fluency/service/record.hpp"

namespace py = pybind11;
using fluency::Json;

namespace {

std::string dump(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

Json load(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw fluency::Error(fluency::ErrorCode::InvalidInput, "invalid JSON");
  return j;
}

py::tuple plan_windows(double clip_s, int duration_s, int overlap_pct) {
  auto plan = fluency::segmenter::plan_windows(
      clip_s, fluency::SegmentationConfig::make(duration_s, overlap_pct));
  py::list windows;
  for (const auto& w : plan.windows) windows.append(py::make_tuple(w.start_s, w.end_s));
  return py::make_tuple(windows, plan.hop_s, plan.padded);
}

std::string aggregate(const std::string& analyses_json, double mild, double moderate) {
  auto analyses = load(analyses_json).get<std::vector<fluency::ChunkAnalysis>>();
  fluency::analysis::SeverityThresholds t{mild, moderate};
  t.check();
  return dump(fluency::analysis::aggregate(analyses, t));
}

std::string validate_plan(const std::string& plan_json) {
  return dump(fluency::validate_plan_json(load(plan_json)));
}

std::string parse_plan_output(const std::string& raw) {
  return dump(fluency::orchestrator::parse_plan_output(raw));
}

std::string apply_review(const std::string& state_json, const std::string& action,
                         const std::string& feedback, const std::string& clinician_id,
                         bool plan_valid) {
  auto state = load(state_json).get<fluency::review::ReviewState>();
  auto kind = fluency::review::action_from_string(action);
  if (!kind) throw fluency::Error(fluency::ErrorCode::InvalidInput, "action=" + action);
  fluency::review::ReviewAction a{*kind, feedback, clinician_id, fluency::review::now()};
  std::vector<fluency::Violation> violations;
  if (!plan_valid) violations.push_back({"plan", fluency::ViolationReason::MissingField, ""});
  auto t = fluency::review::apply_review(state, a, violations);
  return dump({{"state", t.state}, {"effect", std::string(fluency::review::to_string(t.effect))}});
}

fluency::prompt::PromptContext context_from(const Json& j) {
  std::optional<std::vector<fluency::PhonemeScore>> correlation;
  if (j.contains("phoneme_correlation") && !j["phoneme_correlation"].is_null()) {
    correlation = j["phoneme_correlation"].get<std::vector<fluency::PhonemeScore>>();
  }
  return fluency::prompt::make_context(
      j.value("patient", Json::object()).get<fluency::PatientProfile>(),
      j.at("classification").get<fluency::OverallClassification>(),
      j.value("chunks", std::vector<fluency::ChunkAnalysis>{}), std::move(correlation));
}

py::tuple render_therapy_prompt(const std::string& context_json) {
  auto p = fluency::prompt::render_therapy_prompt(context_from(load(context_json)));
  return py::make_tuple(p.system, p.human);
}

std::string run_mock_loop(const std::string& context_json, int rounds, std::uint64_t seed) {
  const auto ctx = context_from(load(context_json));
  fluency::orchestrator::OrchestrationConfig config;
  config.rounds = rounds;
  fluency::llm::ScriptedChatBackend backend(seed);
  auto result = fluency::orchestrator::run_loop(ctx, config, backend);
  return dump({{"final_plan", result.final_plan},
               {"history", result.history},
               {"critic_texts", result.critic_texts},
               {"red_flag", result.red_flag},
               {"calls", backend.calls()}});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Speech therapy planning core";

  static py::exception<fluency::Error> error(m, "FluencyError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const fluency::Error& e) {
      error(e.what());
    }
  });

  m.def("plan_windows", &plan_windows, py::arg("clip_s"), py::arg("duration_s") = 4,
        py::arg("overlap_pct") = 50, "Returns (windows, hop_s, padded)");
  m.def("softmax_temperature",
        [](const std::vector<double>& logits, double temperature) {
          return fluency::llm::softmax_temperature(logits, temperature);
        },
        py::arg("logits"), py::arg("temperature"));
  m.def("aggregate", &aggregate, py::arg("analyses_json"), py::arg("mild_max_pct") = 10.0,
        py::arg("moderate_max_pct") = 25.0);
  m.def("validate_plan", &validate_plan, py::arg("plan_json"));
  m.def("detect_red_flag",
        [](const std::string& text) { return fluency::detect_red_flag(text); },
        py::arg("text"));
  m.def("parse_plan_output", &parse_plan_output, py::arg("raw"));
  m.def("apply_review", &apply_review, py::arg("state_json"), py::arg("action"),
        py::arg("feedback") = "", py::arg("clinician_id") = "", py::arg("plan_valid") = true);
  m.def("render_therapy_prompt", &render_therapy_prompt, py::arg("context_json"));
  m.def("run_mock_loop", &run_mock_loop, py::arg("context_json"), py::arg("rounds") = 2,
        py::arg("seed") = 0);
}
