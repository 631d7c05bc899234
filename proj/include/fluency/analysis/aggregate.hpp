#pragma once

#include <span>
#include <vector>

#include "fluency/analysis/backends.hpp"
#include "fluency/core/types.hpp"

namespace fluency::analysis {

/// Chunk-percentage cutoffs for severity. These are configurable defaults,
/// not clinical norms.
struct SeverityThresholds {
  double mild_max_pct = 10.0;
  double moderate_max_pct = 25.0;

  /// Throws Error(BadConfig) unless 0 < mild < moderate < 100.
  void check() const;
};

Severity severity_for(double stuttering_pct, const SeverityThresholds& thresholds);

/// Classifies every chunk, up to max_parallel at a time, preserving chunk
/// order. Distributions missing labels, containing non-finite values or not
/// summing to 1 +/- 1e-6 raise Error(BackendUnavailable, "schema mismatch").
/// Any backend failure aborts the whole call.
std::vector<ChunkAnalysis> classify_all(std::span<const Chunk> chunks,
                                        ClassifierBackend& backend,
                                        int max_parallel = 4);

/// Fills transcript and phonemes for each analysis from the matching chunk.
/// Either backend may be null, leaving that field untouched.
void enrich_all(std::vector<ChunkAnalysis>& analyses, std::span<const Chunk> chunks,
                TranscriberBackend* transcriber, PhonemizerBackend* phonemizer);

/// Overall diagnosis from per-chunk results:
///  - stuttering_pct: share of chunks whose top label is not Fluent;
///  - primary/secondary: most frequent non-Fluent top labels, ties broken by
///    summed confidence then label order (all Fluent gives primary Fluent);
///  - weighted_confidence: duration-weighted mean of top-label confidence;
///  - problematic_phonemes: phoneme_correlation over the same analyses.
/// Throws Error(EmptyInput) for an empty list.
OverallClassification aggregate(std::span<const ChunkAnalysis> analyses,
                                const SeverityThresholds& thresholds = {});

/// Add-one smoothed over-representation of phonemes in disfluent chunks:
/// r(p) = (disfluent count + 1) / (fluent count + 1). Keeps r >= 2 with at
/// least 3 total occurrences, sorted by r descending then phoneme, top 10.
std::vector<PhonemeScore> phoneme_correlation(std::span<const ChunkAnalysis> analyses);

/// Fraction of chunks per top label, all six labels present.
LabelDistribution type_distribution(std::span<const ChunkAnalysis> analyses);

}  // namespace fluency::analysis
