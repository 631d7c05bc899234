// Command-line front end: runs the HTTP service or single pipeline steps.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fluency/analysis/aggregate.hpp"
#include "fluency/audio/wav.hpp"
#include "fluency/core/error.hpp"
#include "fluency/core/serialize.hpp"
#include "fluency/llm/softmax.hpp"
#include "fluency/orchestrator/loop.hpp"
#include "fluency/segmenter/segmenter.hpp"
#include "fluency/service/config.hpp"
#include "fluency/service/http_api.hpp"

namespace {

using fluency::Json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fluency::Error(fluency::ErrorCode::NotFound, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fluency::service::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int serve() {
  auto env = fluency::service::config_from_env();
  fluency::service::ServiceConfig config;
  config.data_dir = env.data_dir;
  config.max_rounds = env.max_rounds;
  fluency::service::SessionService service(config, fluency::service::make_backends(env));
  fluency::service::HttpServer server(service);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << env.host << ":" << env.port
            << (env.llm ? "" : " (mock LLM)") << "\n";
  server.run(env.host, env.port);
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speech therapy planning service and pipeline tools"};
  app.require_subcommand(1);

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service (configured by env vars)");

  std::string wav_path;
  int duration = 4;
  int overlap = 50;
  auto* segment_cmd = app.add_subcommand("segment", "Print the chunk windows for a WAV file");
  segment_cmd->add_option("wav", wav_path, "PCM16 mono WAV")->required()->check(CLI::ExistingFile);
  segment_cmd->add_option("-d,--duration", duration, "Window seconds (3, 4, 5)");
  segment_cmd->add_option("-k,--overlap", overlap, "Overlap percent (0, 25, 50, 75)");

  std::uint64_t seed = 0;
  auto* classify_cmd = app.add_subcommand("classify", "Classify a WAV file with the mock backend");
  classify_cmd->add_option("wav", wav_path, "PCM16 mono WAV")->required()->check(CLI::ExistingFile);
  classify_cmd->add_option("-d,--duration", duration, "Window seconds (3, 4, 5)");
  classify_cmd->add_option("-k,--overlap", overlap, "Overlap percent (0, 25, 50, 75)");
  classify_cmd->add_option("--seed", seed, "Mock seed");

  std::string plan_path;
  auto* validate_cmd = app.add_subcommand("validate-plan", "Validate a therapy plan JSON file");
  validate_cmd->add_option("plan", plan_path, "Plan JSON (may be fenced)")->required();

  std::vector<double> logits;
  double temperature = 1.0;
  auto* softmax_cmd = app.add_subcommand("softmax", "Temperature-scaled softmax of logits");
  softmax_cmd->add_option("logits", logits, "Logit values")->required();
  softmax_cmd->add_option("-T,--temperature", temperature, "Temperature >= 0");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve();

    if (*segment_cmd || *classify_cmd) {
      const auto config = fluency::SegmentationConfig::make(duration, overlap);
      const auto clip = fluency::audio::decode_wav(read_file(wav_path));
      if (*segment_cmd) {
        const auto plan = fluency::segmenter::plan_windows(clip.duration_s(), config);
        Json windows = Json::array();
        for (const auto& w : plan.windows) windows.push_back({w.start_s, w.end_s});
        std::cout << Json{{"duration_s", clip.duration_s()},
                          {"hop_s", plan.hop_s},
                          {"padded", plan.padded},
                          {"windows", windows}}
                         .dump(2)
                  << "\n";
        return 0;
      }
      const auto chunks = fluency::segmenter::segment(clip, config);
      fluency::analysis::MockClassifier classifier(seed);
      const auto analyses = fluency::analysis::classify_all(chunks, classifier);
      std::cout << Json{{"chunks", analyses},
                        {"overall", fluency::analysis::aggregate(analyses)}}
                       .dump(2)
                << "\n";
      return 0;
    }

    if (*validate_cmd) {
      try {
        fluency::orchestrator::parse_plan_output(read_file(plan_path));
      } catch (const fluency::Error& e) {
        if (e.code() != fluency::ErrorCode::ParseFailure) throw;
        Json doc = Json::parse(read_file(plan_path), nullptr, false);
        Json violations = doc.is_discarded() ? Json::array()
                                             : Json(fluency::validate_plan_json(doc));
        std::cout << Json{{"valid", false}, {"error", e.detail()}, {"violations", violations}}
                         .dump(2)
                  << "\n";
        return 1;
      }
      std::cout << Json{{"valid", true}}.dump() << "\n";
      return 0;
    }

    if (*softmax_cmd) {
      std::cout << Json(fluency::llm::softmax_temperature(logits, temperature)).dump() << "\n";
      return 0;
    }
  } catch (const fluency::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
