#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "fluency/analysis/aggregate.hpp"
#include "fluency/analysis/backends.hpp"
#include "fluency/llm/chat.hpp"
#include "fluency/prompt/templates.hpp"
#include "fluency/service/record.hpp"
#include "fluency/service/store.hpp"

namespace fluency::service {

/// Created once at startup and shared by every session.
struct Backends {
  std::shared_ptr<analysis::ClassifierBackend> classifier;
  std::shared_ptr<analysis::TranscriberBackend> transcriber;
  std::shared_ptr<analysis::PhonemizerBackend> phonemizer;
  std::shared_ptr<llm::ChatBackend> chat;
};

/// Deterministic mocks for every backend.
Backends mock_backends(std::uint64_t seed);

struct ServiceConfig {
  std::filesystem::path data_dir = "data";
  int workers = 2;
  int max_rounds = orchestrator::OrchestrationConfig::kMaxRounds;
  int max_modifications = 1;
  analysis::SeverityThresholds thresholds{};
  prompt::TemplateSet templates = prompt::TemplateSet::builtin();
};

struct SessionRequest {
  Mode mode = Mode::Full;
  PatientProfile patient;
  SegmentationConfig seg_config;
  orchestrator::OrchestrationConfig orch_config;
};

/// Parses the submission metadata:
///   {"mode", "patient": {...}, "seg_config": {"duration_s", "overlap_pct"},
///    "orch_config": {"rounds", ...}}
/// Throws Error(BadConfig) for unknown modes, locales or out-of-range values.
SessionRequest parse_session_request(const nlohmann::json& metadata, int max_rounds);

/// Session lifecycle manager. Writers are serialized and persist every change
/// before publishing it; readers get immutable snapshots and never wait on a
/// running pipeline.
class SessionService {
 public:
  SessionService(ServiceConfig config, Backends backends);
  ~SessionService();

  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  /// Validates the WAV and configs, persists a Queued session and schedules
  /// processing. Throws Error(BadAudio | EmptyAudio | BadConfig).
  std::string create_session(const SessionRequest& request, std::string_view wav_bytes);

  /// Classification-only session in ResultsReady -> full pipeline reusing the
  /// stored chunk classifications. Throws Error(InvalidState).
  void upgrade_session(const std::string& id);

  /// Throws Error(NotFound).
  std::shared_ptr<const SessionRecord> snapshot(const std::string& id) const;
  std::vector<std::string> session_ids() const;

  nlohmann::json get_status(const std::string& id) const;
  /// Throws Error(InvalidState) before results exist.
  nlohmann::json get_results(const std::string& id) const;
  /// WAV of chunk n (zero-padded when the clip is short). Throws
  /// Error(ChunkOutOfRange).
  std::string get_chunk_audio(const std::string& id, int n) const;
  /// Applies the clinician action atomically and returns the new lifecycle.
  Lifecycle post_review(const std::string& id, const review::ReviewAction& action);
  /// Throws Error(InvalidState) before results exist.
  std::string export_html(const std::string& id) const;

  /// Blocks until the session's change counter exceeds `seen` or the timeout
  /// passes; returns the current counter.
  std::uint64_t wait_for_change(const std::string& id, std::uint64_t seen,
                                std::chrono::milliseconds timeout) const;
  std::uint64_t version(const std::string& id) const;

  /// Blocks until no job is queued or running.
  void wait_idle() const;

 private:
  using Mutator = std::function<void(SessionRecord&)>;

  std::shared_ptr<const SessionRecord> commit(const std::string& id, const Mutator& fn);
  void publish(SessionRecord record);
  void enqueue(std::function<void()> job);
  void worker_loop();
  void recover();

  void process(const std::string& id);
  void run_full(const std::string& id, std::vector<ChunkAnalysis> analyses,
                const std::vector<Chunk>& chunks);
  void revise(const std::string& id, std::string feedback);
  void fail(const std::string& id, const std::string& reason);
  void progress(const std::string& id, Stage stage, double value, std::string message);
  std::vector<Chunk> load_chunks(const SessionRecord& record) const;

  ServiceConfig config_;
  Backends backends_;
  SessionStore store_;

  std::mutex write_mutex_;
  mutable std::mutex read_mutex_;
  mutable std::condition_variable changed_;
  std::map<std::string, std::shared_ptr<const SessionRecord>> sessions_;
  std::map<std::string, std::uint64_t> versions_;

  mutable std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  mutable std::condition_variable idle_cv_;
  std::deque<std::function<void()>> queue_;
  int running_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace fluency::service
