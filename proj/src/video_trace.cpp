#include "prefetchsim/video_trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "prefetchsim/rng.hpp"
#include "text_util.hpp"

namespace prefetchsim {

FrameTrace::FrameTrace(double fps, std::vector<std::int64_t> frame_sizes)
    : fps_(fps), sizes_(std::move(frame_sizes)) {
  if (!(fps_ > 0.0)) throw std::invalid_argument("fps must be positive");
  if (sizes_.empty()) throw std::invalid_argument("zero frames");
  prefix_.resize(sizes_.size() + 1);
  prefix_[0] = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] <= 0)
      throw std::invalid_argument("frame " + std::to_string(i) + " has non-positive size");
    prefix_[i + 1] = prefix_[i] + sizes_[i];
  }
}

double FrameTrace::avg_mbps() const {
  return static_cast<double>(total_bytes()) * 8.0 * fps_ /
         (static_cast<double>(sizes_.size()) * 1e6);
}

double FrameTrace::peak_mbps() const {
  return static_cast<double>(*std::max_element(sizes_.begin(), sizes_.end())) * 8.0 * fps_ / 1e6;
}

double FrameTrace::frame_rate_mbps(std::size_t i) const {
  return static_cast<double>(sizes_.at(i)) * 8.0 * fps_ / 1e6;
}

std::int64_t FrameTrace::byte_offset_at_frame(std::size_t frame_index) const {
  if (frame_index > sizes_.size())
    throw std::out_of_range("frame index " + std::to_string(frame_index) + " past end of trace");
  return prefix_[frame_index];
}

std::size_t FrameTrace::frame_at_byte_offset(double bytes) const {
  // Last prefix entry <= bytes; a partially covered frame does not count.
  const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), bytes,
                                   [](double b, std::int64_t p) { return b < static_cast<double>(p); });
  return static_cast<std::size_t>(it - prefix_.begin()) - 1;
}

FrameTrace FrameTrace::looped(std::size_t frames) const {
  std::vector<std::int64_t> out;
  out.reserve(frames);
  for (std::size_t i = 0; i < frames; ++i) out.push_back(sizes_[i % sizes_.size()]);
  return FrameTrace(fps_, std::move(out));
}

FrameTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file " + path.string());

  std::string line;
  std::size_t line_no = 0;
  double fps = 0.0;
  bool header_seen = false;
  std::vector<std::int64_t> sizes;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    if (!header_seen) {
      const auto cols = detail::split(text, ',');
      const auto value = cols.size() == 2 ? detail::parse_double(cols[1]) : std::nullopt;
      if (cols.size() != 2 || cols[0] != "fps" || !value)
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": expected header 'fps,<value>'");
      fps = *value;
      header_seen = true;
      continue;
    }
    const auto size = detail::parse_int(text);
    if (!size)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": malformed frame size '" + std::string(text) + "'");
    if (*size <= 0)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": non-positive frame size");
    sizes.push_back(*size);
  }
  if (sizes.empty()) throw std::runtime_error(path.string() + ": zero frames");
  return FrameTrace(fps, std::move(sizes));
}

void save_trace(const FrameTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file " + path.string());
  out.precision(17);
  out << "fps," << trace.fps() << '\n';
  for (auto s : trace.frame_sizes()) out << s << '\n';
  if (!out) throw std::runtime_error("failed writing trace file " + path.string());
}

FrameTrace synthesize_trace(double fps, double target_avg_mbps, double target_peak_mbps,
                            double duration_s, std::uint64_t seed) {
  if (!(fps > 0.0)) throw std::invalid_argument("fps must be positive");
  if (!(target_avg_mbps > 0.0) || !(target_peak_mbps > target_avg_mbps))
    throw std::invalid_argument("infeasible trace targets: need 0 < avg < peak");
  const auto frames = static_cast<std::size_t>(std::llround(duration_s * fps));
  if (frames < 200)
    throw std::invalid_argument("trace too short: need at least 200 frames");

  const double avg_bytes = target_avg_mbps * 1e6 / (8.0 * fps);
  const double peak_bytes = std::floor(target_peak_mbps * 1e6 / (8.0 * fps));
  if (peak_bytes < 1.0) throw std::invalid_argument("peak rate below one byte per frame");

  // Pick sigma so the expected sample maximum lands near the peak.
  const double z_max = std::sqrt(2.0 * std::log(static_cast<double>(frames)));
  const double log_ratio = std::log(target_peak_mbps / target_avg_mbps);
  const double disc = z_max * z_max - 2.0 * log_ratio;
  const double sigma = disc > 0.0 ? z_max - std::sqrt(disc) : z_max;
  const double mu = std::log(avg_bytes) - 0.5 * sigma * sigma;

  Rng rng(seed);
  std::vector<double> x(frames);
  for (auto& v : x) v = std::exp(mu + sigma * rng.standard_normal());

  for (int iter = 0; iter < 200; ++iter) {
    for (auto& v : x) v = std::min(v, peak_bytes);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(frames);
    if (std::abs(mean / avg_bytes - 1.0) < 1e-4) break;
    const double scale = avg_bytes / mean;
    for (auto& v : x) v *= scale;
  }

  std::vector<std::int64_t> sizes(frames);
  const auto cap = static_cast<std::int64_t>(peak_bytes);
  for (std::size_t i = 0; i < frames; ++i)
    sizes[i] = std::clamp<std::int64_t>(std::llround(x[i]), 1, cap);

  FrameTrace trace(fps, std::move(sizes));
  if (std::abs(trace.avg_mbps() / target_avg_mbps - 1.0) > 0.02)
    throw std::invalid_argument("cannot reach target average under the peak constraint");
  return trace;
}

EwmaRate ewma_update(EwmaRate est, double frame_rate_sample_mbps) {
  est.value = est.weight * frame_rate_sample_mbps + (1.0 - est.weight) * est.value;
  return est;
}

}  // namespace prefetchsim
