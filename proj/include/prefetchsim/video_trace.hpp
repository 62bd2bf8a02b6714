// video_trace.hpp
//
// Per-frame video sizes and the EWMA playout-rate estimate.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace prefetchsim {

class FrameTrace {
 public:
  /// Throws std::invalid_argument if fps <= 0, no frames, or any size <= 0.
  FrameTrace(double fps, std::vector<std::int64_t> frame_sizes);

  double fps() const { return fps_; }
  std::size_t frame_count() const { return sizes_.size(); }
  std::span<const std::int64_t> frame_sizes() const { return sizes_; }
  std::int64_t frame_size(std::size_t i) const { return sizes_[i]; }
  std::int64_t total_bytes() const { return prefix_.back(); }

  double avg_mbps() const;
  double peak_mbps() const;
  /// Instantaneous bitrate of frame i at playout cadence.
  double frame_rate_mbps(std::size_t i) const;

  /// Cumulative size of frames [0, frame_index). Throws std::out_of_range past
  /// frame_count().
  std::int64_t byte_offset_at_frame(std::size_t frame_index) const;
  /// Number of whole frames contained in the first `bytes` bytes.
  std::size_t frame_at_byte_offset(double bytes) const;

  /// The trace repeated from frame 0 until it holds `frames` frames.
  FrameTrace looped(std::size_t frames) const;

 private:
  double fps_;
  std::vector<std::int64_t> sizes_;
  std::vector<std::int64_t> prefix_;  // size() + 1 entries
};

/// CSV: first line `fps,<value>`, then one positive integer byte count per line.
FrameTrace load_trace(const std::filesystem::path& path);

/// Log-normal frame sizes clipped at the peak-equivalent size and rescaled to
/// the target average. Deterministic in `seed`.
FrameTrace synthesize_trace(double fps, double target_avg_mbps, double target_peak_mbps,
                            double duration_s, std::uint64_t seed);

/// Summary statistics a synthetic trace is generated from.
struct SynthSpec {
  double fps;
  double avg_mbps;
  double peak_mbps;
  double duration_s;

  /// 24 fps, 1.6 Mbps average, 42 Mbps peak.
  static SynthSpec hd() { return {24.0, 1.6, 42.0, 288.0}; }
  /// 25 fps, 0.6 Mbps average, 6.9 Mbps peak.
  static SynthSpec sd() { return {25.0, 0.6, 6.9, 288.0}; }
};

inline FrameTrace synthesize_trace(const SynthSpec& spec, std::uint64_t seed) {
  return synthesize_trace(spec.fps, spec.avg_mbps, spec.peak_mbps, spec.duration_s, seed);
}

void save_trace(const FrameTrace& trace, const std::filesystem::path& path);

struct EwmaRate {
  double value = 0.0;   // Mbps
  double weight = 0.1;  // weight of the newest sample
};

EwmaRate ewma_update(EwmaRate est, double frame_rate_sample_mbps);

}  // namespace prefetchsim
