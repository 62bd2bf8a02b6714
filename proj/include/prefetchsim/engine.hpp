// engine.hpp
//
// Fixed-step simulation of one run and the Monte Carlo harness on top of it.
//
// Within a tick the engine steps from event to event (a segment boundary, a
// stream finishing a fetch phase or its download, a cache reaching the end of
// its stream), so delivery rates are constant over every span reported to the
// playout buffers. Boundary crossings happen at the realized boundary time,
// with playout brought up to that instant first, so policy decisions do not
// depend on the tick length.
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prefetchsim/energy.hpp"
#include "prefetchsim/playout.hpp"
#include "prefetchsim/route.hpp"
#include "prefetchsim/scheme.hpp"
#include "prefetchsim/video_trace.hpp"

namespace prefetchsim {

struct ScenarioConfig {
  SchemeKind scheme = SchemeKind::Prefetch;
  int num_streams = 4;
  int num_hotspots = 4;
  double scale_m = 1.0;
  double scale_w = 1.0;
  double scale_a = 1.0;
  double time_var = 0.10;
  double thr_var = 0.20;
  int runs = 120;
  std::uint64_t base_seed = 1;
  double tick_s = 0.01;
  std::size_t playout_threshold_frames = kDefaultPlayoutThresholdFrames;
  double wifi_warmup_s = 20.0;
  double ewma_weight = 0.1;
  EnergyModel energy;

  std::shared_ptr<const FrameTrace> trace;
  /// Replaces the built-in route (num_hotspots is then ignored); the scale
  /// factors still apply.
  std::optional<Route> route;

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
  /// The nominal route this config simulates.
  Route nominal_route() const;
};

struct StreamOutcome {
  std::size_t paused_frames = 0;
  std::size_t frames_played = 0;
  double frontier_bytes = 0.0;
  double cellular_bytes = 0.0;
  double backhaul_bytes = 0.0;
  double cache_bytes = 0.0;
  double start_instant_s = 0.0;
};

/// Cache state when the node reached a prefetching hotspot, and what was read
/// from it during the stay.
struct CacheVisit {
  HotspotCache cache;
  double entry_s = 0.0;
  double fill_rate_cap_mbps = 0.0;  // realized ADSL of the hotspot
  std::vector<double> frontier_at_entry;
  std::vector<double> bytes_read;
};

struct TimelineRow {
  double time_s;
  std::size_t stream;
  Source source;
  double rate_mbps;
  double frontier_bytes;
  std::size_t next_frame;
  std::size_t paused_total;
};

struct RunResult {
  std::size_t paused_frames_total = 0;
  EnergyAccount energy;
  std::vector<StreamOutcome> streams;
  std::vector<CacheVisit> cache_visits;
  std::vector<TimelineRow> timeline;
  std::size_t stream_frames = 0;  // frames per stream
  double route_end_s = 0.0;
};

struct RunOptions {
  bool timeline = false;
};

/// Deterministic in (config, run_index).
RunResult run_once(const ScenarioConfig& config, std::size_t run_index, RunOptions options = {});

/// Runs a realized route directly; run_once samples one and calls this.
RunResult simulate(const ScenarioConfig& config, const Route& nominal,
                   const RealizedRoute& realized, RunOptions options = {});

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
  double ci95 = 0.0; // half-width, 1.96 * std / sqrt(n)
};

/// Mean, sample std and 95% CI half-width; zero spread for n == 1.
Stat summarize(std::span<const double> samples);

struct ScenarioResult {
  ScenarioConfig config;
  Stat paused;
  Stat energy_j;
  std::size_t runs = 0;
  std::vector<double> paused_samples;  // indexed by run
  std::vector<double> energy_samples;
};

/// Runs 0..runs-1 on up to `jobs` threads; the result does not depend on jobs.
ScenarioResult run_scenario(const ScenarioConfig& config, int jobs = 1);

/// One result per config, in order. Throws std::invalid_argument when empty.
std::vector<ScenarioResult> sweep(std::span<const ScenarioConfig> configs, int jobs = 1);

}  // namespace prefetchsim
