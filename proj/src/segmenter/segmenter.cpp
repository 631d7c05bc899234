#include "fluency/segmenter/segmenter.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>

#include "fluency/core/error.hpp"

namespace fluency::segmenter {

namespace {

// Absorbs binary-fraction noise in durations derived from sample counts.
constexpr double kTimeEps = 1e-9;

std::size_t round_half_even(double x) {
  // nearbyint honours the current rounding mode, which is round-to-nearest,
  // ties-to-even unless someone changed it.
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double r = std::nearbyint(x);
  std::fesetround(saved);
  return r <= 0.0 ? 0 : static_cast<std::size_t>(r);
}

}  // namespace

WindowPlan plan_windows(double clip_duration_s, const SegmentationConfig& config) {
  if (!(clip_duration_s >= 0.0) || !std::isfinite(clip_duration_s)) {
    throw Error(ErrorCode::InvalidInput, "clip duration must be >= 0");
  }
  WindowPlan plan;
  plan.hop_s = config.hop_s();
  const double d = config.duration_s();
  if (clip_duration_s + kTimeEps < d) {
    plan.windows.push_back({0.0, d});
    plan.padded = true;
    return plan;
  }
  for (long i = 0;; ++i) {
    const double start = static_cast<double>(i) * config.hop_centis() / 100.0;
    if (start + d > clip_duration_s + kTimeEps) break;
    plan.windows.push_back({start, start + d});
  }
  if (plan.windows.back().end_s + kTimeEps < clip_duration_s) {
    plan.windows.push_back({clip_duration_s - d, clip_duration_s});
  }
  return plan;
}

std::vector<Chunk> segment(const AudioClip& clip, const SegmentationConfig& config) {
  if (clip.samples.empty()) throw Error(ErrorCode::EmptyAudio, "clip has no samples");
  if (clip.sample_rate_hz <= 0) throw Error(ErrorCode::BadAudio, "sample_rate<=0");

  const WindowPlan plan = plan_windows(clip.duration_s(), config);
  const std::size_t total = clip.samples.size();
  const std::size_t window_len =
      static_cast<std::size_t>(config.duration_s()) * clip.sample_rate_hz;

  std::vector<Chunk> chunks;
  chunks.reserve(plan.windows.size());
  for (std::size_t i = 0; i < plan.windows.size(); ++i) {
    const Window& w = plan.windows[i];
    std::size_t first = round_half_even(w.start_s * clip.sample_rate_hz);
    if (!plan.padded && first + window_len > total) first = total - window_len;

    Chunk c;
    c.index = static_cast<int>(i);
    c.start_s = w.start_s;
    c.end_s = w.end_s;
    c.sample_rate_hz = clip.sample_rate_hz;
    c.samples.assign(window_len, 0);
    const std::size_t avail = first < total ? std::min(window_len, total - first) : 0;
    std::copy_n(clip.samples.begin() + static_cast<std::ptrdiff_t>(first), avail,
                c.samples.begin());
    c.valid_samples = avail;
    chunks.push_back(std::move(c));
  }
  return chunks;
}

}  // namespace fluency::segmenter
