#include "prefetchsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "prefetchsim/rng.hpp"

namespace prefetchsim {

namespace {

constexpr double kBytesPerMbit = 1e6 / 8.0;
constexpr double kTimeEps = 1e-9;
constexpr int kMaxEventsPerTick = 100000;

std::size_t stream_frame_count(const FrameTrace& trace, double route_end_s) {
  const auto cover = static_cast<std::size_t>(std::ceil(route_end_s * trace.fps() - 1e-9));
  return std::max(trace.frame_count(), cover);
}

double wifi_on_time(const RealizedRoute& realized, double warmup_s) {
  std::vector<std::pair<double, double>> spans;
  for (const auto& seg : realized.segments) {
    if (seg.access == Access::WiFi) spans.emplace_back(std::max(0.0, seg.start_s - warmup_s), seg.end_s);
  }
  double total = 0.0;
  double covered_to = 0.0;
  for (const auto& [lo, hi] : spans) {
    const double from = std::max(lo, covered_to);
    if (hi > from) total += hi - from;
    covered_to = std::max(covered_to, hi);
  }
  return total;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (num_streams < 1) throw std::invalid_argument("number of streams must be at least 1");
  if (runs < 1) throw std::invalid_argument("number of runs must be at least 1");
  if (!route && num_hotspots != 2 && num_hotspots != 4 && num_hotspots != 8)
    throw std::invalid_argument("number of hotspots must be 2, 4 or 8");
  if (!(scale_m > 0.0) || !(scale_w > 0.0) || !(scale_a > 0.0))
    throw std::invalid_argument("throughput scale factors must be positive");
  if (!(time_var >= 0.0 && time_var < 1.0))
    throw std::invalid_argument("time variability must be in [0, 1)");
  if (!(thr_var >= 0.0 && thr_var < 1.0))
    throw std::invalid_argument("throughput variability must be in [0, 1)");
  if (!(tick_s > 0.0)) throw std::invalid_argument("tick must be positive");
  if (playout_threshold_frames < 1)
    throw std::invalid_argument("playout threshold must be at least one frame");
  if (!(wifi_warmup_s >= 0.0)) throw std::invalid_argument("WiFi warm-up must be >= 0");
  if (!(ewma_weight > 0.0 && ewma_weight <= 1.0))
    throw std::invalid_argument("EWMA weight must be in (0, 1]");
  energy.validate();
  if (!trace) throw std::invalid_argument("missing trace source");
  if (route) route->validate();
}

Route ScenarioConfig::nominal_route() const {
  Route r = route ? scale_route(*route, scale_m, scale_w, scale_a)
                  : build_route(num_hotspots, scale_m, scale_w, scale_a);
  r.wifi_warmup_s = wifi_warmup_s;
  return r;
}

RunResult run_once(const ScenarioConfig& config, std::size_t run_index, RunOptions options) {
  config.validate();
  const Route nominal = config.nominal_route();
  Rng rng(derive_run_seed(config.base_seed, run_index));
  const RealizedRoute realized = sample_realization(nominal, config.time_var, config.thr_var, rng);
  return simulate(config, nominal, realized, options);
}

RunResult simulate(const ScenarioConfig& config, const Route& nominal,
                   const RealizedRoute& realized, RunOptions options) {
  config.validate();
  const std::size_t n = static_cast<std::size_t>(config.num_streams);
  const double end_s = realized.end_s();

  const auto stream_trace = std::make_shared<const FrameTrace>(
      config.trace->looped(stream_frame_count(*config.trace, nominal.nominal_end_s())));
  const EwmaRate initial_rate{config.trace->avg_mbps(), config.ewma_weight};

  std::vector<StreamState> streams;
  streams.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    streams.emplace_back(stream_trace, config.playout_threshold_frames, initial_rate);

  RunResult result;
  result.streams.resize(n);
  result.stream_frames = stream_trace->frame_count();
  result.route_end_s = end_s;

  SchemeController controller(config.scheme);
  std::size_t segment = 0;
  auto view = [&]() { return RunView{nominal, realized, segment, streams}; };

  std::optional<CacheVisit> visit;
  auto close_visit = [&]() {
    if (visit) result.cache_visits.push_back(std::move(*visit));
    visit.reset();
  };

  controller.on_exit_wifi(view(), 0.0);

  double cellular_transfer_s = 0.0;
  double wifi_transfer_s = 0.0;

  // Crossing into the next segment at time t: playout is brought up to t
  // first, so policy decisions see the state at the exact boundary instant.
  auto cross_boundaries = [&](double t) {
    bool advanced = false;
    while (segment + 1 < realized.segments.size() &&
           t >= realized.boundaries_s[segment + 1] - kTimeEps) {
      if (!advanced) {
        for (auto& s : streams) s.advance_playout(t);
        advanced = true;
      }
      const std::size_t prev = segment++;
      if (realized.segments[prev].access == Access::WiFi) close_visit();
      if (realized.segments[prev].access == Access::WiFi &&
          realized.segments[segment].access == Access::Cellular)
        controller.on_exit_wifi(view(), t);
      if (realized.segments[segment].access == Access::WiFi) {
        controller.on_enter_wifi(view(), t);
        const auto& cache = controller.cache();
        if (config.scheme == SchemeKind::Prefetch && cache && cache->segment == segment) {
          CacheVisit v;
          v.cache = *cache;
          v.entry_s = t;
          v.fill_rate_cap_mbps = realized.segments[segment].adsl_mbps;
          v.bytes_read.assign(n, 0.0);
          for (const auto& s : streams) v.frontier_at_entry.push_back(s.received_frontier());
          visit = std::move(v);
        }
      }
    }
  };

  for (std::size_t k = 0;; ++k) {
    const double t0 = static_cast<double>(k) * config.tick_s;
    if (t0 >= end_s - kTimeEps) break;
    const double t1 = std::min(static_cast<double>(k + 1) * config.tick_s, end_s);

    double t = t0;
    std::optional<TransferPlan> first_plan;
    for (int events = 0; t < t1 - kTimeEps; ++events) {
      if (events > kMaxEventsPerTick) throw std::logic_error("engine made no progress within a tick");
      cross_boundaries(t);
      const auto v = view();
      TransferPlan plan = controller.plan_tick(v);
      double h = t1 - t;
      if (segment + 1 < realized.segments.size())
        h = std::min(h, realized.boundaries_s[segment + 1] - t);
      for (const auto& tr : plan.streams) {
        if (tr.rate_mbps > 0.0) h = std::min(h, tr.goal_bytes / (tr.rate_mbps * kBytesPerMbit));
      }
      h = std::min(h, controller.time_to_fill_event(v));
      h = std::max(h, 0.0);

      bool cellular_busy = false;
      bool wifi_busy = false;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& tr = plan.streams[i];
        if (tr.source == Source::None || tr.rate_mbps <= 0.0) continue;
        double bytes = tr.rate_mbps * h * kBytesPerMbit;
        if (bytes >= tr.goal_bytes * (1.0 - 1e-12) - 1e-9) bytes = tr.goal_bytes;
        const double got = streams[i].deliver_bytes(bytes, t, t + h);
        auto& out = result.streams[i];
        switch (tr.source) {
          case Source::OriginViaCellular:
            out.cellular_bytes += got;
            cellular_busy = true;
            break;
          case Source::OriginViaBackhaul:
            out.backhaul_bytes += got;
            wifi_busy = true;
            break;
          case Source::LocalCache:
            out.cache_bytes += got;
            if (visit) visit->bytes_read[i] += got;
            wifi_busy = true;
            break;
          case Source::None:
            break;
        }
      }
      if (cellular_busy) cellular_transfer_s += h;
      if (wifi_busy) wifi_transfer_s += h;
      controller.fill_caches(v, h);
      if (!first_plan) first_plan = std::move(plan);
      t += h;
    }

    for (auto& s : streams) s.advance_playout(t1);

    if (options.timeline) {
      std::size_t paused_total = 0;
      for (const auto& s : streams) paused_total += s.paused_frames();
      for (std::size_t i = 0; i < n; ++i) {
        const StreamTransfer tr = first_plan ? first_plan->streams[i] : StreamTransfer{};
        result.timeline.push_back({t1, i, tr.source, tr.rate_mbps, streams[i].received_frontier(),
                                   streams[i].next_frame(), paused_total});
      }
    }
  }
  close_visit();

  for (std::size_t i = 0; i < n; ++i) {
    auto& out = result.streams[i];
    out.paused_frames = streams[i].paused_frames();
    out.frames_played = streams[i].next_frame();
    out.frontier_bytes = streams[i].received_frontier();
    out.start_instant_s = streams[i].start_instant_s();
    result.paused_frames_total += out.paused_frames;
  }

  double cellular_bytes = 0.0;
  double wifi_bytes = 0.0;
  for (const auto& out : result.streams) {
    cellular_bytes += out.cellular_bytes;
    wifi_bytes += out.backhaul_bytes + out.cache_bytes;
  }
  EnergyAccount acct;
  acct = accumulate(acct, config.energy, Interface::Cellular, cellular_bytes / 1e6, end_s,
                    std::min(cellular_transfer_s, end_s));
  if (config.scheme != SchemeKind::MobileOnly) {
    const double on = wifi_on_time(realized, nominal.wifi_warmup_s);
    acct = accumulate(acct, config.energy, Interface::WiFi, wifi_bytes / 1e6, on,
                      std::min(wifi_transfer_s, on));
  }
  result.energy = acct;
  return result;
}

Stat summarize(std::span<const double> samples) {
  Stat s;
  if (samples.empty()) return s;
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  s.mean = sum / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
    s.ci95 = 1.96 * s.std / std::sqrt(n);
  }
  return s;
}

ScenarioResult run_scenario(const ScenarioConfig& config, int jobs) {
  config.validate();
  const auto runs = static_cast<std::size_t>(config.runs);
  ScenarioResult out;
  out.config = config;
  out.runs = runs;
  out.paused_samples.assign(runs, 0.0);
  out.energy_samples.assign(runs, 0.0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs) return;
      try {
        const RunResult r = run_once(config, i);
        out.paused_samples[i] = static_cast<double>(r.paused_frames_total);
        out.energy_samples[i] = r.energy.total_j;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };

  const auto threads = static_cast<std::size_t>(std::clamp(jobs, 1, 256));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < std::min(threads, runs); ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  out.paused = summarize(out.paused_samples);
  out.energy_j = summarize(out.energy_samples);
  return out;
}

std::vector<ScenarioResult> sweep(std::span<const ScenarioConfig> configs, int jobs) {
  if (configs.empty()) throw std::invalid_argument("sweep needs at least one scenario");
  std::vector<ScenarioResult> results;
  results.reserve(configs.size());
  for (const auto& c : configs) results.push_back(run_scenario(c, jobs));
  return results;
}

}  // namespace prefetchsim
