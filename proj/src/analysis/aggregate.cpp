#include "fluency/analysis/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>

#include "fluency/core/error.hpp"

namespace fluency::analysis {

void SeverityThresholds::check() const {
  if (!(0.0 < mild_max_pct && mild_max_pct < moderate_max_pct &&
        moderate_max_pct < 100.0)) {
    throw Error(ErrorCode::BadConfig,
                "severity thresholds must satisfy 0 < mild < moderate < 100");
  }
}

Severity severity_for(double pct, const SeverityThresholds& t) {
  if (pct <= t.mild_max_pct) return Severity::Mild;
  if (pct <= t.moderate_max_pct) return Severity::Moderate;
  return Severity::Severe;
}

namespace {

void check_distribution(const LabelDistribution& probs, int chunk_index) {
  auto fail = [chunk_index](const std::string& why) {
    throw Error(ErrorCode::BackendUnavailable,
                "schema mismatch at chunk " + std::to_string(chunk_index) +
                    ": " + why);
  };
  if (probs.size() != kAllLabels.size()) {
    fail("expected 6 labels, got " + std::to_string(probs.size()));
  }
  double sum = 0.0;
  for (const auto& [label, p] : probs) {
    if (!std::isfinite(p) || p < 0.0) fail("invalid probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) fail("probabilities sum to " + std::to_string(sum));
}

ChunkAnalysis classify_one(const Chunk& chunk, ClassifierBackend& backend) {
  ChunkAnalysis a;
  a.chunk_index = chunk.index;
  a.start_s = chunk.start_s;
  a.end_s = chunk.end_s;
  try {
    a.label_probs = backend.classify(chunk);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::BackendUnavailable, e.what());
  }
  check_distribution(a.label_probs, chunk.index);
  assign_top_label(a);
  return a;
}

}  // namespace

std::vector<ChunkAnalysis> classify_all(std::span<const Chunk> chunks,
                                        ClassifierBackend& backend,
                                        int max_parallel) {
  if (chunks.empty()) throw Error(ErrorCode::EmptyInput, "no chunks to classify");
  const std::size_t batch = static_cast<std::size_t>(std::max(1, max_parallel));
  std::vector<ChunkAnalysis> out;
  out.reserve(chunks.size());
  if (batch == 1) {
    for (const auto& c : chunks) out.push_back(classify_one(c, backend));
    return out;
  }
  for (std::size_t first = 0; first < chunks.size(); first += batch) {
    const std::size_t last = std::min(chunks.size(), first + batch);
    std::vector<std::future<ChunkAnalysis>> pending;
    for (std::size_t i = first; i < last; ++i) {
      pending.push_back(std::async(std::launch::async, classify_one,
                                   std::cref(chunks[i]), std::ref(backend)));
    }
    // get() in order: results land in chunk order, and the first failure
    // propagates only after its siblings finished.
    std::exception_ptr failure;
    for (auto& f : pending) {
      try {
        out.push_back(f.get());
      } catch (...) {
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  return out;
}

void enrich_all(std::vector<ChunkAnalysis>& analyses, std::span<const Chunk> chunks,
                TranscriberBackend* transcriber, PhonemizerBackend* phonemizer) {
  if (analyses.size() != chunks.size()) {
    throw Error(ErrorCode::InvalidInput, "analysis/chunk count mismatch");
  }
  try {
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      if (transcriber) analyses[i].transcript = transcriber->transcribe(chunks[i]);
      if (phonemizer) analyses[i].phonemes = phonemizer->phonemize(chunks[i]);
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::BackendUnavailable, e.what());
  }
}

OverallClassification aggregate(std::span<const ChunkAnalysis> analyses,
                                const SeverityThresholds& thresholds) {
  if (analyses.empty()) throw Error(ErrorCode::EmptyInput, "no chunk analyses");
  thresholds.check();

  struct Tally {
    int count = 0;
    double confidence = 0.0;
  };
  std::map<StutterLabel, Tally> tallies;
  int disfluent = 0;
  double weighted = 0.0;
  double total_duration = 0.0;
  for (const auto& a : analyses) {
    const double dur = a.end_s - a.start_s > 0.0 ? a.end_s - a.start_s : 1.0;
    weighted += a.confidence * dur;
    total_duration += dur;
    if (is_disfluent(a.top_label)) {
      ++disfluent;
      auto& t = tallies[a.top_label];
      ++t.count;
      t.confidence += a.confidence;
    }
  }

  std::vector<std::pair<StutterLabel, Tally>> ranked(tallies.begin(), tallies.end());
  // std::map iterates in label order, so stable_sort keeps label order as the
  // final tie-break.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    if (x.second.count != y.second.count) return x.second.count > y.second.count;
    return x.second.confidence > y.second.confidence;
  });

  OverallClassification out;
  out.primary_type = ranked.empty() ? StutterLabel::Fluent : ranked[0].first;
  if (ranked.size() > 1) out.secondary_type = ranked[1].first;
  out.stuttering_pct = 100.0 * disfluent / static_cast<double>(analyses.size());
  out.weighted_confidence = weighted / total_duration;
  out.severity = severity_for(out.stuttering_pct, thresholds);
  out.problematic_phonemes = phoneme_correlation(analyses);
  return out;
}

std::vector<PhonemeScore> phoneme_correlation(std::span<const ChunkAnalysis> analyses) {
  struct Counts {
    int disfluent = 0;
    int fluent = 0;
  };
  std::map<std::string, Counts> counts;
  for (const auto& a : analyses) {
    if (!a.phonemes) continue;
    for (const auto& p : *a.phonemes) {
      auto& c = counts[p];
      (is_disfluent(a.top_label) ? c.disfluent : c.fluent) += 1;
    }
  }
  std::vector<PhonemeScore> out;
  for (const auto& [phoneme, c] : counts) {
    const double ratio = (c.disfluent + 1.0) / (c.fluent + 1.0);
    if (ratio >= 2.0 && c.disfluent + c.fluent >= 3) out.push_back({phoneme, ratio});
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.ratio != y.ratio) return x.ratio > y.ratio;
    return x.phoneme < y.phoneme;
  });
  if (out.size() > 10) out.resize(10);
  return out;
}

LabelDistribution type_distribution(std::span<const ChunkAnalysis> analyses) {
  LabelDistribution out;
  for (auto label : kAllLabels) out[label] = 0.0;
  if (analyses.empty()) return out;
  for (const auto& a : analyses) out[a.top_label] += 1.0;
  for (auto& [label, v] : out) v /= static_cast<double>(analyses.size());
  return out;
}

}  // namespace fluency::analysis
