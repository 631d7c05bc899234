#include "fluency/service/service.hpp"

#include <random>

#include "fluency/audio/wav.hpp"
#include "fluency/core/error.hpp"
#include "fluency/core/serialize.hpp"
#include "fluency/orchestrator/loop.hpp"
#include "fluency/prompt/render.hpp"
#include "fluency/segmenter/segmenter.hpp"
#include "fluency/service/export.hpp"

namespace fluency::service {

namespace {

std::string new_session_id() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uint64_t hi = rng();
  std::uint64_t lo = rng();
  hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;  // version 4
  lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;  // RFC 4122 variant
  char buf[37];
  std::snprintf(buf, sizeof buf, "%08x-%04x-%04x-%04x-%012llx",
                static_cast<unsigned>(hi >> 32), static_cast<unsigned>((hi >> 16) & 0xFFFF),
                static_cast<unsigned>(hi & 0xFFFF), static_cast<unsigned>(lo >> 48),
                static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
  return buf;
}

std::string describe(const Error& e) {
  return std::string(to_string(e.code())) + ": " + e.detail();
}

Lifecycle lifecycle_for(review::ReviewPhase phase) {
  switch (phase) {
    case review::ReviewPhase::PendingReview: return Lifecycle::PendingReview;
    case review::ReviewPhase::Revising: return Lifecycle::Revising;
    case review::ReviewPhase::Approved: return Lifecycle::Approved;
    case review::ReviewPhase::Rejected: return Lifecycle::Rejected;
  }
  return Lifecycle::PendingReview;
}

}  // namespace

Backends mock_backends(std::uint64_t seed) {
  return {std::make_shared<analysis::MockClassifier>(seed),
          std::make_shared<analysis::MockTranscriber>(seed),
          std::make_shared<analysis::MockPhonemizer>(seed),
          std::make_shared<llm::ScriptedChatBackend>(seed)};
}

SessionRequest parse_session_request(const Json& metadata, int max_rounds) {
  if (!metadata.is_object()) throw Error(ErrorCode::BadConfig, "metadata must be an object");
  SessionRequest req;
  try {
    auto mode = mode_from_string(metadata.value("mode", std::string("full")));
    if (!mode) throw Error(ErrorCode::BadConfig, "mode=" + metadata["mode"].dump());
    req.mode = *mode;
    req.patient = metadata.value("patient", Json::object()).get<PatientProfile>();
    const Json seg = metadata.value("seg_config", Json::object());
    req.seg_config = SegmentationConfig::make(seg.value("duration_s", 4),
                                              seg.value("overlap_pct", 50));
    req.orch_config =
        metadata.value("orch_config", Json::object()).get<orchestrator::OrchestrationConfig>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("metadata: ") + e.what());
  }
  check_patient(req.patient);
  req.orch_config.check();
  if (req.orch_config.rounds > max_rounds) {
    throw Error(ErrorCode::BadConfig, "rounds=" + std::to_string(req.orch_config.rounds));
  }
  return req;
}

SessionService::SessionService(ServiceConfig config, Backends backends)
    : config_(std::move(config)), backends_(std::move(backends)), store_(config_.data_dir) {
  if (!backends_.classifier) throw Error(ErrorCode::BadConfig, "classifier backend required");
  config_.thresholds.check();
  recover();
  const int n = std::max(1, config_.workers);
  for (int i = 0; i < n; ++i) workers_.emplace_back([this] { worker_loop(); });
}

SessionService::~SessionService() {
  {
    std::lock_guard lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  for (auto& t : workers_) t.join();
}

void SessionService::recover() {
  for (auto& record : store_.load_all()) {
    if (is_busy(record.lifecycle)) {
      record.lifecycle = Lifecycle::Failed;
      record.failure_reason = "interrupted";
      store_.save(record);
    }
    publish(std::move(record));
  }
}

void SessionService::publish(SessionRecord record) {
  const std::string id = record.id;
  auto ptr = std::make_shared<const SessionRecord>(std::move(record));
  {
    std::lock_guard lock(read_mutex_);
    sessions_[id] = std::move(ptr);
    ++versions_[id];
  }
  changed_.notify_all();
}

std::shared_ptr<const SessionRecord> SessionService::commit(const std::string& id,
                                                            const Mutator& fn) {
  std::lock_guard write(write_mutex_);
  SessionRecord next = *snapshot(id);
  fn(next);
  store_.save(next);
  publish(next);
  return snapshot(id);
}

std::shared_ptr<const SessionRecord> SessionService::snapshot(const std::string& id) const {
  std::lock_guard lock(read_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "session " + id);
  return it->second;
}

std::vector<std::string> SessionService::session_ids() const {
  std::lock_guard lock(read_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

std::uint64_t SessionService::version(const std::string& id) const {
  std::lock_guard lock(read_mutex_);
  auto it = versions_.find(id);
  if (it == versions_.end()) throw Error(ErrorCode::NotFound, "session " + id);
  return it->second;
}

std::uint64_t SessionService::wait_for_change(const std::string& id, std::uint64_t seen,
                                              std::chrono::milliseconds timeout) const {
  std::unique_lock lock(read_mutex_);
  auto it = versions_.find(id);
  if (it == versions_.end()) throw Error(ErrorCode::NotFound, "session " + id);
  changed_.wait_for(lock, timeout, [&] { return versions_.at(id) > seen; });
  return versions_.at(id);
}

void SessionService::enqueue(std::function<void()> job) {
  {
    std::lock_guard lock(queue_mutex_);
    queue_.push_back(std::move(job));
  }
  queue_cv_.notify_one();
}

void SessionService::worker_loop() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lock(queue_mutex_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_ && queue_.empty()) return;
      job = std::move(queue_.front());
      queue_.pop_front();
      ++running_;
    }
    job();
    {
      std::lock_guard lock(queue_mutex_);
      --running_;
    }
    idle_cv_.notify_all();
  }
}

void SessionService::wait_idle() const {
  std::unique_lock lock(queue_mutex_);
  idle_cv_.wait(lock, [&] { return queue_.empty() && running_ == 0; });
}

std::string SessionService::create_session(const SessionRequest& request,
                                           std::string_view wav_bytes) {
  check_patient(request.patient);
  request.orch_config.check();
  if (request.orch_config.rounds > config_.max_rounds) {
    throw Error(ErrorCode::BadConfig, "rounds=" + std::to_string(request.orch_config.rounds));
  }
  const AudioClip clip = audio::decode_wav(std::string(wav_bytes));
  if (clip.samples.empty()) throw Error(ErrorCode::EmptyAudio, "no samples");

  SessionRecord record;
  record.id = new_session_id();
  record.mode = request.mode;
  record.lifecycle = Lifecycle::Queued;
  record.patient = request.patient;
  record.seg_config = request.seg_config;
  record.orch_config = request.orch_config;
  record.sample_rate_hz = clip.sample_rate_hz;
  record.sample_count = clip.samples.size();
  record.windows = segmenter::plan_windows(clip.duration_s(), request.seg_config).windows;
  record.review.max_modifications = config_.max_modifications;
  record.created_at = review::now();

  store_.write_audio(record.id, wav_bytes);
  {
    std::lock_guard write(write_mutex_);
    store_.save(record);
    publish(record);
  }
  const std::string id = record.id;
  enqueue([this, id] { process(id); });
  return id;
}

std::vector<Chunk> SessionService::load_chunks(const SessionRecord& record) const {
  const AudioClip clip = audio::decode_wav(store_.read_audio(record.id));
  return segmenter::segment(clip, record.seg_config);
}

void SessionService::progress(const std::string& id, Stage stage, double value,
                              std::string message) {
  commit(id, [&](SessionRecord& r) {
    if (r.lifecycle == Lifecycle::Queued) r.lifecycle = Lifecycle::Processing;
    if (const auto* last = r.latest_event(); last && r.lifecycle == Lifecycle::Processing) {
      value = std::max(value, last->progress);
    }
    r.events.push_back({stage, value, std::move(message)});
  });
}

void SessionService::fail(const std::string& id, const std::string& reason) {
  commit(id, [&](SessionRecord& r) {
    r.lifecycle = Lifecycle::Failed;
    r.failure_reason = reason;
  });
}

void SessionService::process(const std::string& id) {
  try {
    progress(id, Stage::Segmenting, 0.05, "segmenting audio");
    auto record = snapshot(id);
    const auto chunks = load_chunks(*record);

    progress(id, Stage::Classifying, 0.10,
             "classifying " + std::to_string(chunks.size()) + " chunks");
    auto analyses = analysis::classify_all(chunks, *backends_.classifier);

    if (record->mode == Mode::ClassificationOnly) {
      auto classification = analysis::aggregate(analyses, config_.thresholds);
      commit(id, [&](SessionRecord& r) {
        r.analyses = std::move(analyses);
        r.classification = std::move(classification);
        r.lifecycle = Lifecycle::ResultsReady;
      });
      return;
    }
    run_full(id, std::move(analyses), chunks);
  } catch (const orchestrator::GenerationError& e) {
    const auto records = e.history();
    commit(id, [&](SessionRecord& r) {
      r.history.insert(r.history.end(), records.begin(), records.end());
      r.lifecycle = Lifecycle::Failed;
      r.failure_reason = describe(e);
    });
  } catch (const Error& e) {
    fail(id, describe(e));
  } catch (const std::exception& e) {
    fail(id, std::string("internal: ") + e.what());
  }
}

void SessionService::run_full(const std::string& id, std::vector<ChunkAnalysis> analyses,
                              const std::vector<Chunk>& chunks) {
  if (!backends_.chat) throw Error(ErrorCode::BackendUnavailable, "no chat backend");
  progress(id, Stage::Transcribing, 0.45, "transcribing and phonemizing");
  analysis::enrich_all(analyses, chunks, backends_.transcriber.get(),
                       backends_.phonemizer.get());
  auto classification = analysis::aggregate(analyses, config_.thresholds);
  auto record = commit(id, [&](SessionRecord& r) {
    r.analyses = analyses;
    r.classification = classification;
  });

  const auto ctx = prompt::make_context(record->patient, classification, analyses,
                                        classification.problematic_phonemes);
  const int n = record->orch_config.rounds;
  const double span = 2.0 * n + 1.0;
  orchestrator::LoopOptions options;
  options.session_id = id;
  options.templates = &config_.templates;
  options.on_progress = [&](orchestrator::LoopStage stage, int round) {
    switch (stage) {
      case orchestrator::LoopStage::Generating:
        progress(id, Stage::Generating, 0.55, "generating initial plan");
        break;
      case orchestrator::LoopStage::Critiquing:
        progress(id, Stage::Critiquing, 0.55 + 0.4 * (2 * round - 1) / span,
                 "critic review, round " + std::to_string(round));
        break;
      case orchestrator::LoopStage::Refining:
        progress(id, Stage::Refining, 0.55 + 0.4 * (2 * round) / span,
                 "refining plan, round " + std::to_string(round));
        break;
    }
  };
  auto result = orchestrator::run_loop(ctx, record->orch_config, *backends_.chat, options);

  commit(id, [&](SessionRecord& r) {
    r.plan = std::move(result.final_plan);
    r.plan_degraded = result.degraded();
    if (result.failed_round) {
      r.last_error = "refinement round " + std::to_string(*result.failed_round) +
                     " did not produce a valid plan; kept the previous plan";
    }
    r.critic_texts = std::move(result.critic_texts);
    r.history.insert(r.history.end(), result.history.begin(), result.history.end());
    r.review.phase = review::ReviewPhase::PendingReview;
    r.lifecycle = Lifecycle::PendingReview;
  });
}

void SessionService::upgrade_session(const std::string& id) {
  commit(id, [&](SessionRecord& r) {
    if (r.mode != Mode::ClassificationOnly || r.lifecycle != Lifecycle::ResultsReady) {
      throw Error(ErrorCode::InvalidState,
                  "upgrade requires a classification_only session in ResultsReady");
    }
    r.mode = Mode::Full;
    r.lifecycle = Lifecycle::Processing;
  });
  enqueue([this, id] {
    try {
      auto record = snapshot(id);
      run_full(id, record->analyses, load_chunks(*record));
    } catch (const orchestrator::GenerationError& e) {
      const auto records = e.history();
      commit(id, [&](SessionRecord& r) {
        r.history.insert(r.history.end(), records.begin(), records.end());
        r.lifecycle = Lifecycle::Failed;
        r.failure_reason = describe(e);
      });
    } catch (const Error& e) {
      fail(id, describe(e));
    } catch (const std::exception& e) {
      fail(id, std::string("internal: ") + e.what());
    }
  });
}

Lifecycle SessionService::post_review(const std::string& id,
                                      const review::ReviewAction& action) {
  std::string feedback;
  bool schedule = false;
  auto record = commit(id, [&](SessionRecord& r) {
    const bool in_review =
        r.lifecycle == Lifecycle::PendingReview || r.lifecycle == Lifecycle::Revising ||
        r.lifecycle == Lifecycle::Approved || r.lifecycle == Lifecycle::Rejected;
    if (!r.plan || !in_review) throw Error(ErrorCode::InvalidAction, "not pending");
    auto transition = review::apply_review(r.review, action, validate_plan(*r.plan));
    review::ReviewAction stamped = action;
    if (stamped.timestamp == review::Timestamp{}) stamped.timestamp = review::now();
    review::AuditLog log(std::move(r.audit_log));
    log.append(stamped, transition.state.phase);
    r.audit_log = log.entries();
    r.review = transition.state;
    r.lifecycle = lifecycle_for(transition.state.phase);
    switch (transition.effect) {
      case review::Effect::Finalize:
        r.events.push_back({Stage::Exporting, 1.0, "plan approved; export ready"});
        break;
      case review::Effect::Terminate:
        break;
      case review::Effect::ScheduleRevision:
        r.events.push_back({Stage::Refining, 0.0, "applying clinician feedback"});
        feedback = action.feedback;
        schedule = true;
        break;
    }
  });
  if (schedule) enqueue([this, id, feedback] { revise(id, feedback); });
  return record->lifecycle;
}

void SessionService::revise(const std::string& id, std::string feedback) {
  auto record = snapshot(id);
  try {
    if (!backends_.chat) throw Error(ErrorCode::BackendUnavailable, "no chat backend");
    const auto ctx = prompt::make_context(
        record->patient, record->classification, record->analyses,
        record->classification ? std::optional(record->classification->problematic_phonemes)
                               : std::nullopt);
    orchestrator::LoopOptions options;
    options.session_id = id;
    options.templates = &config_.templates;
    auto result = orchestrator::apply_human_revision(
        *record->plan, feedback, ctx, record->orch_config, *backends_.chat,
        static_cast<int>(record->history.size()), record->review.modification_count, options);
    commit(id, [&](SessionRecord& r) {
      r.plan = std::move(result.final_plan);
      r.history.insert(r.history.end(), result.history.begin(), result.history.end());
      r.review = review::revision_complete(r.review);
      r.lifecycle = Lifecycle::PendingReview;
      r.events.push_back({Stage::Refining, 1.0, "revision complete"});
    });
  } catch (const std::exception& e) {
    std::vector<GenerationRecord> records;
    std::string reason = e.what();
    if (const auto* g = dynamic_cast<const orchestrator::GenerationError*>(&e)) {
      records = g->history();
    }
    if (const auto* err = dynamic_cast<const Error*>(&e)) reason = describe(*err);
    // The previous plan stays reviewable; only approve/reject remain once the
    // modification budget is spent.
    commit(id, [&](SessionRecord& r) {
      r.history.insert(r.history.end(), records.begin(), records.end());
      r.last_error = "revision failed: " + reason;
      r.review = review::revision_complete(r.review);
      r.lifecycle = Lifecycle::PendingReview;
    });
  }
}

Json SessionService::get_status(const std::string& id) const {
  return status_document(*snapshot(id));
}

Json SessionService::get_results(const std::string& id) const {
  auto record = snapshot(id);
  if (!has_results(record->lifecycle)) {
    throw Error(ErrorCode::InvalidState,
                "results not available in " + std::string(to_string(record->lifecycle)));
  }
  return results_document(*record);
}

std::string SessionService::get_chunk_audio(const std::string& id, int n) const {
  auto record = snapshot(id);
  if (n < 0 || static_cast<std::size_t>(n) >= record->windows.size()) {
    throw Error(ErrorCode::ChunkOutOfRange,
                "chunk " + std::to_string(n) + " of " + std::to_string(record->windows.size()));
  }
  const auto chunks = load_chunks(*record);
  const Chunk& c = chunks.at(static_cast<std::size_t>(n));
  return audio::encode_wav(c.samples, c.sample_rate_hz);
}

std::string SessionService::export_html(const std::string& id) const {
  auto record = snapshot(id);
  if (!has_results(record->lifecycle)) {
    throw Error(ErrorCode::InvalidState,
                "export not available in " + std::string(to_string(record->lifecycle)));
  }
  return render_html(*record);
}

}  // namespace fluency::service
