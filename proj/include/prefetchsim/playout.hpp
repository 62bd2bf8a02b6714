// playout.hpp
//
// Per-stream playout buffer. Bytes arrive at a contiguous frontier; once the
// start threshold is buffered, frames are played at fps cadence. A frame whose
// bytes are missing at its due instant is counted as paused once and playback
// stalls until it arrives; later due times shift by the stall length.
//
// Deliveries carry their time span so that the instant a given byte arrived
// can be recovered by linear interpolation. This makes pause decisions
// independent of the engine tick as long as the delivery rate is constant over
// each reported span.
#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "prefetchsim/video_trace.hpp"

namespace prefetchsim {

inline constexpr std::size_t kDefaultPlayoutThresholdFrames = 200;

class StreamState {
 public:
  StreamState(std::shared_ptr<const FrameTrace> stream, std::size_t threshold_frames,
              EwmaRate ewma);

  /// Appends up to n bytes arriving uniformly over [from_s, to_s]; capped at
  /// the stream size. Returns the bytes accepted.
  double deliver_bytes(double n, double from_s, double to_s);
  /// Instantaneous delivery at the latest recorded instant.
  double deliver_bytes(double n);

  /// Plays or pauses every frame due at or before now_s. Throws
  /// std::invalid_argument if now_s is earlier than a previous call.
  void advance_playout(double now_s);

  const FrameTrace& stream() const { return *stream_; }
  double received_frontier() const { return frontier_; }
  double total_bytes() const { return static_cast<double>(stream_->total_bytes()); }
  double remaining_bytes() const { return total_bytes() - frontier_; }
  bool complete() const { return frontier_ >= total_bytes(); }

  std::size_t next_frame() const { return next_frame_; }
  /// Byte position of the playback cursor.
  double playback_position() const {
    return static_cast<double>(stream_->byte_offset_at_frame(next_frame_));
  }
  bool playout_started() const { return started_; }
  double start_instant_s() const { return start_s_; }
  std::size_t paused_frames() const { return paused_; }
  double stall_shift_s() const { return stall_shift_s_; }
  bool stalled() const { return stalled_; }
  const EwmaRate& ewma() const { return ewma_; }
  std::size_t threshold_frames() const { return threshold_; }

 private:
  /// Instant at which the frontier first reached `bytes` (bytes <= frontier).
  double arrival_instant(double bytes) const;
  void play_frame();

  std::shared_ptr<const FrameTrace> stream_;
  std::size_t threshold_;
  EwmaRate ewma_;

  double frontier_ = 0.0;
  // (time, frontier) breakpoints since the last advance_playout call.
  std::vector<std::pair<double, double>> trail_{{0.0, 0.0}};
  double clock_s_ = 0.0;

  bool started_ = false;
  double start_s_ = 0.0;
  std::size_t next_frame_ = 0;
  std::size_t paused_ = 0;
  double stall_shift_s_ = 0.0;
  bool stalled_ = false;
  double stall_due_s_ = 0.0;
};

}  // namespace prefetchsim
