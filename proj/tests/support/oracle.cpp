#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

namespace {

using prefetchsim::SchemeKind;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;

double bytes_per_s(double mbps) { return mbps * 1e6 / 8.0; }

struct Piece {
  double t0, t1;
  double b0, b1;
};

// First instant at which the cumulative byte curve reaches x.
double reach(const std::vector<Piece>& curve, double x) {
  for (const auto& p : curve) {
    if (p.b1 >= x) {
      if (p.b1 == p.b0) return p.t0;
      return p.t0 + (x - p.b0) / (p.b1 - p.b0) * (p.t1 - p.t0);
    }
  }
  return kInf;
}

}  // namespace

Outcome evaluate(const MicroScenario& sc) {
  const std::size_t legs = sc.legs.size();
  std::vector<double> start(legs + 1, 0.0);
  for (std::size_t k = 0; k < legs; ++k) start[k + 1] = start[k] + sc.legs[k].duration_s;
  const double end = start[legs];

  // Stream: the trace looped until it covers the route.
  const std::size_t base = sc.frame_sizes.size();
  const auto cover = static_cast<std::size_t>(std::ceil(end * sc.fps - 1e-9));
  const std::size_t frames = std::max(base, cover);
  std::vector<double> prefix(frames + 1, 0.0);
  for (std::size_t i = 0; i < frames; ++i)
    prefix[i + 1] = prefix[i] + static_cast<double>(sc.frame_sizes[i % base]);
  const double total = prefix[frames];

  double trace_bytes = 0.0;
  for (auto s : sc.frame_sizes) trace_bytes += static_cast<double>(s);
  const double trace_avg_mbps = trace_bytes * 8.0 * sc.fps / (static_cast<double>(base) * 1e6);

  const double n = sc.streams;
  auto cellular_before = [&](std::size_t k) {
    for (std::size_t i = k + 1; i-- > 0;)
      if (!sc.legs[i].wifi) return sc.legs[i].cellular_mbps;
    return 0.0;
  };

  // Cache placed at run start for the first hotspot faster than leg 0's
  // cellular link; filled at ADSL / n until the node gets there.
  std::size_t cache_leg = legs;
  double cache_lo = kInf, cache_hi = kInf;
  if (sc.scheme == SchemeKind::Prefetch) {
    for (std::size_t k = 1; k < legs; ++k) {
      if (sc.legs[k].wifi && sc.legs[k].wifi_mbps > sc.legs[0].cellular_mbps) {
        cache_leg = k;
        break;
      }
    }
    if (cache_leg < legs) {
      const double travel = start[cache_leg];
      cache_lo = std::min(trace_avg_mbps * travel * 1e6 / 8.0, total);
      const double filled = bytes_per_s(sc.legs[cache_leg].adsl_mbps / n) * travel;
      cache_hi = cache_lo + std::min(filled, total - cache_lo);
    }
  }

  auto rate_mbps = [&](std::size_t k, double b) {
    const Leg& leg = sc.legs[k];
    if (!leg.wifi) return leg.cellular_mbps / n;
    if (sc.scheme == SchemeKind::MobileOnly) return cellular_before(k) / n;
    if (k == cache_leg && b >= cache_lo && b < cache_hi) return leg.wifi_mbps / n;
    return leg.adsl_mbps / n;
  };
  auto over_cellular = [&](std::size_t k) {
    return !sc.legs[k].wifi || sc.scheme == SchemeKind::MobileOnly;
  };

  // Per-stream cumulative byte curve.
  Outcome out;
  std::vector<Piece> curve;
  double t = 0.0, b = 0.0;
  std::size_t k = 0;
  while (k < legs && b < total) {
    if (t >= start[k + 1] - kEps) {
      ++k;
      continue;
    }
    const double r = bytes_per_s(rate_mbps(k, b));
    double next_b = total;
    if (b < cache_lo) next_b = std::min(next_b, cache_lo);
    else if (b < cache_hi) next_b = std::min(next_b, cache_hi);
    double dt = start[k + 1] - t;
    double db = r * dt;
    if (b + db >= next_b) {
      db = next_b - b;
      dt = db / r;
    }
    curve.push_back({t, t + dt, b, b + db});
    if (over_cellular(k)) out.cellular_bytes += db * n;
    else out.wifi_bytes += db * n;
    t += dt;
    b += db;
  }

  // Playout: frame i is due one frame period after the previous one played
  // and plays when it has fully arrived.
  const std::size_t threshold = std::min(sc.threshold_frames, frames);
  const double begin = reach(curve, prefix[threshold]);
  std::size_t paused = 0;
  if (begin <= end + kEps) {
    double due = begin;
    for (std::size_t i = 0; i < frames && due <= end + kEps; ++i) {
      const double avail = reach(curve, prefix[i + 1]);
      if (avail > due + kEps) ++paused;
      if (avail > end + kEps) break;
      due = std::max(due, avail) + 1.0 / sc.fps;
    }
  }
  out.paused_frames = paused * static_cast<std::size_t>(sc.streams);
  return out;
}

prefetchsim::ScenarioConfig to_config(const MicroScenario& sc, double tick_s) {
  using namespace prefetchsim;
  ScenarioConfig c;
  c.scheme = sc.scheme;
  c.num_streams = sc.streams;
  c.time_var = 0.0;
  c.thr_var = 0.0;
  c.runs = 1;
  c.tick_s = tick_s;
  c.playout_threshold_frames = sc.threshold_frames;
  c.trace = std::make_shared<const FrameTrace>(sc.fps, sc.frame_sizes);
  Route route;
  double at = 0.0;
  for (std::size_t k = 0; k < sc.legs.size(); ++k) {
    const Leg& leg = sc.legs[k];
    Segment seg;
    seg.index = static_cast<int>(k + 1);
    seg.access = leg.wifi ? Access::WiFi : Access::Cellular;
    seg.nominal_start_s = at;
    seg.nominal_duration_s = leg.duration_s;
    if (leg.wifi) {
      seg.wifi_mbps = leg.wifi_mbps;
      seg.adsl_mbps = leg.adsl_mbps;
    } else {
      seg.cellular_mbps = leg.cellular_mbps;
    }
    route.segments.push_back(seg);
    at += leg.duration_s;
  }
  c.route = route;
  return c;
}

Outcome from_engine(const prefetchsim::RunResult& r) {
  Outcome o;
  o.paused_frames = r.paused_frames_total;
  for (const auto& s : r.streams) {
    o.cellular_bytes += s.cellular_bytes;
    o.wifi_bytes += s.backhaul_bytes + s.cache_bytes;
  }
  return o;
}

std::vector<MicroScenario> scenarios() {
  using prefetchsim::SchemeKind;
  const std::vector<std::int64_t> sizes = {180000, 60000, 70000,  90000,  110000, 75000, 160000,
                                           50000,  85000, 95000,  140000, 65000,  72000, 88000,
                                           130000, 55000, 99000,  101000, 77000,  120000};
  const std::vector<std::int64_t> short_sizes(sizes.begin(), sizes.begin() + 10);

  auto cell = [](double d, double m) { return Leg{false, d, m, 0.0, 0.0}; };
  auto hot = [](double d, double w, double a) { return Leg{true, d, 0.0, w, a}; };

  return {
      {"cellular only, one stream starved", SchemeKind::MobileOnly, 1, 5.0, sizes, 2,
       {cell(4.0, 3.0)}},
      {"mobile-only ignores the hotspot", SchemeKind::MobileOnly, 2, 5.0, sizes, 3,
       {cell(1.5, 6.0), hot(1.5, 20.0, 10.0), cell(1.0, 9.0)}},
      {"opportunistic hotspot via backhaul", SchemeKind::OpportunisticWiFi, 2, 5.0, sizes, 3,
       {cell(1.5, 6.0), hot(1.5, 20.0, 10.0), cell(1.0, 9.0)}},
      {"opportunistic stream completes in hotspot", SchemeKind::OpportunisticWiFi, 1, 5.0, sizes, 4,
       {cell(1.0, 8.0), hot(2.0, 30.0, 20.0), cell(1.0, 2.0)}},
      {"prefetch gap fetch then cache read", SchemeKind::Prefetch, 2, 5.0, sizes, 2,
       {cell(2.0, 6.0), hot(1.0, 24.0, 8.0), cell(1.0, 6.0)}},
      {"prefetch all three phases", SchemeKind::Prefetch, 1, 5.0, sizes, 2,
       {cell(1.0, 3.0), hot(2.0, 40.0, 6.0), cell(1.0, 2.0)}},
      {"prefetch skips a slow hotspot", SchemeKind::Prefetch, 3, 5.0, sizes, 2,
       {cell(1.5, 10.0), hot(1.5, 8.0, 5.0), cell(1.0, 4.0)}},
      {"prefetch cache reaches end of looped stream", SchemeKind::Prefetch, 1, 5.0, short_sizes, 3,
       {cell(2.0, 1.0), hot(2.0, 50.0, 40.0)}},
  };
}

}  // namespace oracle
