#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "prefetchsim/rng.hpp"
#include "prefetchsim/video_trace.hpp"

using namespace prefetchsim;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / ("prefetchsim_" + name);
  std::ofstream(p) << text;
  return p;
}

std::string error_of(const std::filesystem::path& p) {
  try {
    load_trace(p);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(FrameTrace, OffsetsAndRates) {
  const FrameTrace t(25.0, {1000, 2000, 3000});
  EXPECT_EQ(t.total_bytes(), 6000);
  EXPECT_EQ(t.byte_offset_at_frame(0), 0);
  EXPECT_EQ(t.byte_offset_at_frame(2), 3000);
  EXPECT_EQ(t.byte_offset_at_frame(3), 6000);
  EXPECT_THROW(t.byte_offset_at_frame(4), std::out_of_range);
  EXPECT_DOUBLE_EQ(t.frame_rate_mbps(1), 2000 * 8 * 25 / 1e6);
  EXPECT_DOUBLE_EQ(t.avg_mbps(), 2000 * 8 * 25 / 1e6);
  EXPECT_DOUBLE_EQ(t.peak_mbps(), 3000 * 8 * 25 / 1e6);
}

TEST(FrameTrace, FrameAtByteOffsetCountsWholeFrames) {
  const FrameTrace t(25.0, {1000, 2000, 3000});
  EXPECT_EQ(t.frame_at_byte_offset(0.0), 0u);
  EXPECT_EQ(t.frame_at_byte_offset(999.9), 0u);
  EXPECT_EQ(t.frame_at_byte_offset(1000.0), 1u);
  EXPECT_EQ(t.frame_at_byte_offset(5999.0), 2u);
  EXPECT_EQ(t.frame_at_byte_offset(6000.0), 3u);
}

TEST(FrameTrace, OffsetRoundTripMatchesBruteForce) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int64_t> sizes(1 + static_cast<std::size_t>(rng.uniform01() * 50));
    for (auto& s : sizes) s = 1 + static_cast<std::int64_t>(rng.uniform01() * 5000);
    const FrameTrace t(24.0, sizes);
    const double b = rng.uniform(0.0, static_cast<double>(t.total_bytes()));
    std::size_t whole = 0;
    double acc = 0;
    for (auto s : sizes) {
      if (acc + s > b) break;
      acc += s;
      ++whole;
    }
    ASSERT_EQ(t.frame_at_byte_offset(b), whole);
  }
}

TEST(FrameTrace, LoopedRepeatsFromStart) {
  const FrameTrace t(10.0, {1, 2, 3});
  const FrameTrace l = t.looped(7);
  ASSERT_EQ(l.frame_count(), 7u);
  EXPECT_EQ(std::vector<std::int64_t>(l.frame_sizes().begin(), l.frame_sizes().end()),
            (std::vector<std::int64_t>{1, 2, 3, 1, 2, 3, 1}));
}

TEST(FrameTrace, RejectsBadInput) {
  EXPECT_THROW(FrameTrace(0.0, {1}), std::invalid_argument);
  EXPECT_THROW(FrameTrace(24.0, {}), std::invalid_argument);
  EXPECT_THROW(FrameTrace(24.0, {5, 0}), std::invalid_argument);
}

TEST(LoadTrace, ReadsFile) {
  const FrameTrace t = load_trace(std::filesystem::path(TEST_DATA_DIR) / "trace_small.csv");
  EXPECT_EQ(t.fps(), 24.0);
  EXPECT_EQ(t.frame_count(), 6u);
  EXPECT_EQ(t.frame_size(4), 15000);
}

TEST(LoadTrace, Errors) {
  EXPECT_NE(error_of(write_temp("empty.csv", "fps,24\n")).find("zero frames"), std::string::npos);
  EXPECT_NE(error_of(write_temp("malformed.csv", "fps,24\n100\nabc\n")).find(":3:"),
            std::string::npos);
  EXPECT_NE(error_of(write_temp("negative.csv", "fps,24\n100\n-4\n")).find("non-positive"),
            std::string::npos);
  EXPECT_NE(error_of(write_temp("header.csv", "24\n100\n")).find("header"), std::string::npos);
  EXPECT_THROW(load_trace("/nonexistent/trace.csv"), std::runtime_error);
}

TEST(LoadTrace, SaveRoundTrip) {
  const FrameTrace t = synthesize_trace(SynthSpec::sd(), 3);
  const auto p = std::filesystem::temp_directory_path() / "prefetchsim_roundtrip.csv";
  save_trace(t, p);
  const FrameTrace back = load_trace(p);
  EXPECT_EQ(back.fps(), t.fps());
  EXPECT_TRUE(std::equal(t.frame_sizes().begin(), t.frame_sizes().end(),
                         back.frame_sizes().begin(), back.frame_sizes().end()));
}

TEST(SynthesizeTrace, HdPreset) {
  const FrameTrace t = synthesize_trace(SynthSpec::hd(), 1);
  EXPECT_EQ(t.frame_count(), 6912u);
  EXPECT_NEAR(t.avg_mbps(), 1.6, 1.6 * 0.02);
  EXPECT_LE(t.peak_mbps(), 42.0);
}

TEST(SynthesizeTrace, SdPreset) {
  const FrameTrace t = synthesize_trace(SynthSpec::sd(), 1);
  EXPECT_EQ(t.frame_count(), 7200u);
  EXPECT_NEAR(t.avg_mbps(), 0.6, 0.6 * 0.02);
  EXPECT_LE(t.peak_mbps(), 6.9);
}

TEST(SynthesizeTrace, DeterministicInSeed) {
  const FrameTrace a = synthesize_trace(SynthSpec::hd(), 9);
  const FrameTrace b = synthesize_trace(SynthSpec::hd(), 9);
  const FrameTrace c = synthesize_trace(SynthSpec::hd(), 10);
  EXPECT_TRUE(std::equal(a.frame_sizes().begin(), a.frame_sizes().end(), b.frame_sizes().begin()));
  EXPECT_FALSE(std::equal(a.frame_sizes().begin(), a.frame_sizes().end(), c.frame_sizes().begin()));
}

TEST(SynthesizeTrace, RandomTargetsHitAverageUnderPeak) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const double fps = rng.uniform(10.0, 60.0);
    const double avg = rng.uniform(0.2, 8.0);
    const double peak = avg * rng.uniform(3.0, 30.0);
    const FrameTrace t = synthesize_trace(fps, avg, peak, 300.0, rng.next_u64());
    ASSERT_NEAR(t.avg_mbps(), avg, avg * 0.02);
    ASSERT_LE(t.peak_mbps(), peak + 1e-9);
  }
}

TEST(SynthesizeTrace, RejectsInfeasibleTargets) {
  EXPECT_THROW(synthesize_trace(24.0, 2.0, 1.0, 288.0, 1), std::invalid_argument);
  EXPECT_THROW(synthesize_trace(24.0, 1.6, 42.0, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(synthesize_trace(0.0, 1.6, 42.0, 288.0, 1), std::invalid_argument);
}

TEST(Ewma, Update) {
  EXPECT_DOUBLE_EQ(ewma_update({1.0, 0.1}, 2.0).value, 1.1);
  EwmaRate e{1.0, 0.1};
  for (double s : {1.0, 1.0, 1.0, 5.0}) e = ewma_update(e, s);
  EXPECT_DOUBLE_EQ(e.value, 1.4);
}
