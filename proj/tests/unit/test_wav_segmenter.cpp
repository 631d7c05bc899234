#include <cmath>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "fluency/audio/wav.hpp"
#include "fluency/core/error.hpp"
#include "fluency/segmenter/segmenter.hpp"
#include "support/fixtures.hpp"

namespace fluency {
namespace {

using segmenter::plan_windows;
using segmenter::Window;

using testing::thrown_code;
using testing::thrown_detail;

TEST(Wav, EncodeDecodeRoundTrip) {
  auto clip = testing::synth_clip(0.5, 22050, 4);
  auto bytes = audio::encode_wav(clip.samples, clip.sample_rate_hz);
  EXPECT_EQ(bytes.size(), 44 + 2 * clip.samples.size());
  auto back = audio::decode_wav(bytes);
  EXPECT_EQ(back.sample_rate_hz, 22050);
  EXPECT_EQ(back.samples, clip.samples);
}

TEST(Wav, RejectsUnsupportedLayouts) {
  auto stereo = testing::raw_wav(2, 16, 16000, 100);
  EXPECT_EQ(thrown_code([&] { audio::decode_wav(stereo); }), ErrorCode::BadAudio);
  EXPECT_EQ(thrown_detail([&] { audio::decode_wav(stereo); }), "channels=2");
  auto deep = testing::raw_wav(1, 24, 16000, 100);
  EXPECT_EQ(thrown_detail([&] { audio::decode_wav(deep); }), "bits_per_sample=24");
  EXPECT_EQ(thrown_code([&] { audio::decode_wav(std::string("hello world, not a wav")); }),
            ErrorCode::BadAudio);
  EXPECT_EQ(thrown_code([&] { audio::decode_wav(std::string()); }), ErrorCode::BadAudio);
}

TEST(Wav, SkipsUnknownChunks) {
  auto clip = testing::synth_clip(0.1);
  auto bytes = audio::encode_wav(clip.samples, clip.sample_rate_hz);
  std::string extra = "LIST";
  extra += std::string("\x03\x00\x00\x00", 4) + "abc" + std::string(1, '\0');
  bytes.insert(36, extra);
  auto back = audio::decode_wav(bytes);
  EXPECT_EQ(back.samples, clip.samples);
}

TEST(Wav, TruncatedDataKeepsWholeSamples) {
  auto clip = testing::synth_clip(0.1);
  auto bytes = audio::encode_wav(clip.samples, clip.sample_rate_hz);
  bytes.resize(bytes.size() - 3);
  EXPECT_EQ(audio::decode_wav(bytes).samples.size(), clip.samples.size() - 2);
}

std::vector<Window> windows(double d_clip, int d, int k) {
  return plan_windows(d_clip, SegmentationConfig::make(d, k)).windows;
}

TEST(PlanWindows, WorkedExamples) {
  EXPECT_EQ(windows(10.0, 4, 50),
            (std::vector<Window>{{0, 4}, {2, 6}, {4, 8}, {6, 10}}));
  EXPECT_EQ(plan_windows(10.0, SegmentationConfig::make(4, 50)).hop_s, 2.0);
  EXPECT_EQ(windows(4.0, 4, 0), (std::vector<Window>{{0, 4}}));
  EXPECT_EQ(windows(9.0, 4, 0), (std::vector<Window>{{0, 4}, {4, 8}, {5, 9}}));
  auto shortp = plan_windows(2.0, SegmentationConfig::make(3, 50));
  EXPECT_TRUE(shortp.padded);
  EXPECT_EQ(shortp.windows, (std::vector<Window>{{0, 3}}));
  EXPECT_FALSE(plan_windows(4.0, SegmentationConfig::make(4, 0)).padded);
}

TEST(PlanWindows, ZeroLengthClipIsOnePaddedWindow) {
  auto p = plan_windows(0.0, SegmentationConfig::make(5, 75));
  EXPECT_TRUE(p.padded);
  EXPECT_EQ(p.windows.size(), 1u);
}

TEST(PlanWindows, RejectsNegativeDuration) {
  EXPECT_EQ(thrown_code([] { windows(-1.0, 4, 0); }), ErrorCode::InvalidInput);
}

// Coverage over random millisecond-resolution durations and all twelve
// configurations: every probe point in [0, D) lies in some window, and all
// windows lie within [0, D].
TEST(PlanWindows, CoverageProperty) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> ms(5000, 120000);
  for (int trial = 0; trial < 200; ++trial) {
    int dms = ms(rng);
    double clip = dms / 1000.0;
    for (int d : {3, 4, 5}) {
      for (int k : {0, 25, 50, 75}) {
        auto ws = windows(clip, d, k);
        for (const auto& w : ws) {
          EXPECT_GE(w.start_s, -1e-9);
          EXPECT_LE(w.end_s, clip + 1e-9);
          EXPECT_NEAR(w.end_s - w.start_s, d, 1e-9);
        }
        for (int t = 0; t < dms; t += 7) {
          double x = t / 1000.0;
          bool covered = false;
          for (const auto& w : ws) covered |= (w.start_s <= x + 1e-9 && x < w.end_s);
          ASSERT_TRUE(covered) << clip << " d=" << d << " k=" << k << " t=" << x;
        }
      }
    }
  }
}

TEST(PlanWindows, HalfOverlapCoversInteriorTwice) {
  auto ws = windows(20.0, 4, 50);
  for (double x = 2.05; x < 18.0; x += 0.1) {
    int n = 0;
    for (const auto& w : ws) n += (w.start_s <= x && x < w.end_s);
    EXPECT_EQ(n, 2) << x;
  }
}

TEST(Segment, TenSecondClipGivesFourFullChunks) {
  auto clip = testing::synth_clip(10.0);
  auto chunks = segmenter::segment(clip, SegmentationConfig::make(4, 50));
  ASSERT_EQ(chunks.size(), 4u);
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    EXPECT_EQ(chunks[i].samples.size(), 64000u);
    EXPECT_FALSE(chunks[i].padded());
    EXPECT_EQ(chunks[i].index, static_cast<int>(i));
    auto first = static_cast<std::size_t>(std::llround(chunks[i].start_s * 16000));
    EXPECT_TRUE(std::equal(chunks[i].samples.begin(), chunks[i].samples.end(),
                           clip.samples.begin() + first));
  }
}

TEST(Segment, ExactFitAndShortClip) {
  auto chunks = segmenter::segment(testing::synth_clip(4.0), SegmentationConfig::make(4, 0));
  ASSERT_EQ(chunks.size(), 1u);
  EXPECT_FALSE(chunks[0].padded());

  auto clip = testing::synth_clip(2.0);
  auto shortc = segmenter::segment(clip, SegmentationConfig::make(3, 50));
  ASSERT_EQ(shortc.size(), 1u);
  EXPECT_TRUE(shortc[0].padded());
  EXPECT_EQ(shortc[0].samples.size(), 48000u);
  EXPECT_EQ(shortc[0].valid_samples, 32000u);
  for (std::size_t i = 32000; i < 48000; ++i) ASSERT_EQ(shortc[0].samples[i], 0);
}

TEST(Segment, TailWindowEndsAtClipEnd) {
  auto clip = testing::synth_clip(61.3);
  auto chunks = segmenter::segment(clip, SegmentationConfig::make(4, 25));
  const auto& tail = chunks.back();
  EXPECT_NEAR(tail.end_s, 61.3, 1e-9);
  EXPECT_EQ(tail.samples.back(), clip.samples.back());
}

TEST(Segment, EmptyClipIsEmptyAudio) {
  AudioClip clip;
  EXPECT_EQ(thrown_code([&] { segmenter::segment(clip, SegmentationConfig::make(4, 50)); }),
            ErrorCode::EmptyAudio);
}

TEST(Segment, Deterministic) {
  auto clip = testing::synth_clip(7.3, 8000, 9);
  auto a = segmenter::segment(clip, SegmentationConfig::make(3, 75));
  auto b = segmenter::segment(clip, SegmentationConfig::make(3, 75));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].samples, b[i].samples);
}

}  // namespace
}  // namespace fluency
