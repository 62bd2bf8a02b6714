#include "prefetchsim/playout.hpp"

#include <algorithm>
#include <stdexcept>

namespace prefetchsim {

namespace {
// Tolerance for "arrived by its due instant"; absorbs rounding in the
// interpolated arrival time.
constexpr double kTimeEps = 1e-9;
// A frontier this close to a frame end counts as having reached it; summing
// per-tick deliveries leaves rounding residue of this order.
constexpr double kByteEps = 1e-6;
}  // namespace

StreamState::StreamState(std::shared_ptr<const FrameTrace> stream, std::size_t threshold_frames,
                         EwmaRate ewma)
    : stream_(std::move(stream)),
      threshold_(std::min(threshold_frames, stream_->frame_count())),
      ewma_(ewma) {
  if (threshold_ == 0) throw std::invalid_argument("playout threshold must be at least one frame");
}

double StreamState::deliver_bytes(double n, double from_s, double to_s) {
  if (n < 0.0) throw std::invalid_argument("cannot deliver a negative byte count");
  if (from_s < trail_.back().first || to_s < from_s)
    throw std::invalid_argument("delivery span runs backwards");
  const double accepted = std::min(n, remaining_bytes());
  if (accepted <= 0.0) return 0.0;
  if (from_s > trail_.back().first) trail_.emplace_back(from_s, frontier_);
  frontier_ += accepted;
  // A capped delivery finishes early, at the rate of the full span.
  trail_.emplace_back(accepted < n ? from_s + (to_s - from_s) * (accepted / n) : to_s, frontier_);
  return accepted;
}

double StreamState::deliver_bytes(double n) {
  const double t = trail_.back().first;
  return deliver_bytes(n, t, t);
}

double StreamState::arrival_instant(double bytes) const {
  const auto it = std::lower_bound(trail_.begin(), trail_.end(), bytes,
                                   [](const auto& p, double b) { return p.second < b; });
  if (it == trail_.begin()) return it->first;
  const auto& [t1, f1] = *it;
  const auto& [t0, f0] = *(it - 1);
  return t0 + (bytes - f0) / (f1 - f0) * (t1 - t0);
}

void StreamState::play_frame() {
  ewma_ = ewma_update(ewma_, stream_->frame_rate_mbps(next_frame_));
  ++next_frame_;
}

void StreamState::advance_playout(double now_s) {
  if (now_s < clock_s_) throw std::invalid_argument("playout clock moved backwards");
  clock_s_ = now_s;

  const double fps = stream_->fps();
  const std::size_t frames = stream_->frame_count();
  auto frame_end = [&](std::size_t i) {
    return static_cast<double>(stream_->byte_offset_at_frame(i + 1));
  };

  if (!started_) {
    const double needed = static_cast<double>(stream_->byte_offset_at_frame(threshold_));
    if (frontier_ >= needed - kByteEps) {
      started_ = true;
      start_s_ = arrival_instant(std::min(needed, frontier_));
    }
  }

  while (started_ && next_frame_ < frames) {
    if (stalled_) {
      const double need = frame_end(next_frame_);
      if (frontier_ < need - kByteEps) break;
      stall_shift_s_ += arrival_instant(std::min(need, frontier_)) - stall_due_s_;
      stalled_ = false;
      play_frame();
      continue;
    }
    const double due = start_s_ + stall_shift_s_ + static_cast<double>(next_frame_) / fps;
    if (due > now_s + kTimeEps) break;
    const double need = frame_end(next_frame_);
    if (frontier_ >= need - kByteEps) {
      const double arrived = arrival_instant(std::min(need, frontier_));
      if (arrived > due + kTimeEps) {
        ++paused_;
        stall_shift_s_ += arrived - due;
      }
      play_frame();
    } else {
      ++paused_;
      stalled_ = true;
      stall_due_s_ = due;
    }
  }

  // Older breakpoints are no longer needed: every byte not yet consumed by a
  // pause decision lies beyond the latest one.
  const auto last = trail_.back();
  trail_.assign(1, {std::max(last.first, now_s), last.second});
}

}  // namespace prefetchsim
