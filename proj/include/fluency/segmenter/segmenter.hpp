#pragma once

#include <vector>

#include "fluency/core/types.hpp"

namespace fluency::segmenter {

struct Window {
  double start_s = 0.0;
  double end_s = 0.0;

  friend bool operator==(const Window&, const Window&) = default;
};

struct WindowPlan {
  std::vector<Window> windows;
  double hop_s = 0.0;
  // Set when the clip is shorter than one window; the single window then
  // extends past the end of the audio and is zero-padded.
  bool padded = false;
};

/// Windows start at 0, hop, 2*hop, ... while they fit inside the clip. A
/// final end-anchored window covers any remaining tail. Clips shorter than
/// one window yield a single padded window (0, duration).
WindowPlan plan_windows(double clip_duration_s, const SegmentationConfig& config);

/// One Chunk per planned window. Sample offsets are round-half-to-even of
/// start_s * sample_rate. Throws Error(EmptyAudio) for a clip with no samples.
std::vector<Chunk> segment(const AudioClip& clip, const SegmentationConfig& config);

}  // namespace fluency::segmenter
