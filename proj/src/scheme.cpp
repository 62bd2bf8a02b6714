#include "prefetchsim/scheme.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace prefetchsim {

namespace {

constexpr double kBytesPerMbit = 1e6 / 8.0;

std::size_t count_active(std::span<const StreamState> streams) {
  return static_cast<std::size_t>(
      std::count_if(streams.begin(), streams.end(), [](const auto& s) { return !s.complete(); }));
}

// Every incomplete stream fetches from `source` at an equal share of `capacity`.
TransferPlan equal_share(std::span<const StreamState> streams, Source source, double capacity) {
  TransferPlan plan;
  plan.streams.resize(streams.size());
  const std::size_t active = count_active(streams);
  if (active == 0) return plan;
  const double share = capacity / static_cast<double>(active);
  for (std::size_t i = 0; i < streams.size(); ++i) {
    if (streams[i].complete()) continue;
    plan.streams[i] = {source, share, streams[i].remaining_bytes()};
  }
  return plan;
}

}  // namespace

std::string_view to_token(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::MobileOnly:
      return "mobile-only";
    case SchemeKind::OpportunisticWiFi:
      return "wifi-noprefetch";
    case SchemeKind::Prefetch:
      return "wifi-prefetch";
  }
  return "?";
}

SchemeKind parse_scheme(std::string_view token) {
  for (auto kind : kAllSchemes) {
    if (to_token(kind) == token) return kind;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(token) +
                              "' (expected mobile-only, wifi-noprefetch or wifi-prefetch)");
}

std::string_view to_string(Source source) {
  switch (source) {
    case Source::OriginViaCellular:
      return "cellular";
    case Source::OriginViaBackhaul:
      return "backhaul";
    case Source::LocalCache:
      return "cache";
    case Source::None:
      return "none";
  }
  return "?";
}

double estimate_offset(const EwmaRate& ewma, double t_next_wifi_s, double current_position) {
  if (t_next_wifi_s < 0.0) throw std::invalid_argument("time to next hotspot must be >= 0");
  return current_position + ewma.value * t_next_wifi_s * kBytesPerMbit;
}

double nominal_cellular_mbps(const Route& route, std::size_t k) {
  for (std::size_t i = k + 1; i-- > 0;) {
    if (route.segments[i].access == Access::Cellular) return route.segments[i].cellular_mbps;
  }
  return 0.0;
}

std::optional<std::size_t> next_qualifying_hotspot(const Route& route, std::size_t from) {
  const double cellular = nominal_cellular_mbps(route, from);
  for (std::size_t j = from + 1; j < route.segments.size(); ++j) {
    const auto& seg = route.segments[j];
    if (seg.access == Access::WiFi && seg.wifi_mbps > cellular) return j;
  }
  return std::nullopt;
}

const HotspotCache* SchemeController::on_exit_wifi(const RunView& view, double now_s) {
  if (kind_ != SchemeKind::Prefetch) return nullptr;
  if (cache_ && cache_->segment > view.segment) return &*cache_;
  cache_.reset();

  const auto target = next_qualifying_hotspot(view.nominal, view.segment);
  if (!target) return nullptr;

  // Prediction uses nominal geometry: the node is assumed to be at the nominal
  // start of its current segment.
  HotspotCache cache;
  cache.segment = *target;
  cache.instruct_time_s = now_s;
  cache.predicted_travel_s = view.nominal.segments[*target].nominal_start_s -
                             view.nominal.segments[view.segment].nominal_start_s;
  cache.entries.reserve(view.streams.size());
  for (const auto& stream : view.streams) {
    const double offset =
        estimate_offset(stream.ewma(), cache.predicted_travel_s, stream.playback_position());
    cache.entries.push_back({std::min(offset, stream.total_bytes()), 0.0});
  }
  cache_ = std::move(cache);
  return &*cache_;
}

void SchemeController::on_enter_wifi(const RunView& view, double /*now_s*/) {
  if (cache_ && cache_->segment == view.segment) cache_->filling = false;
}

TransferPlan SchemeController::plan_tick(const RunView& view) const {
  const auto& seg = view.realized.segments[view.segment];
  const auto streams = view.streams;

  if (kind_ == SchemeKind::MobileOnly || seg.access == Access::Cellular)
    return equal_share(streams, Source::OriginViaCellular,
                       view.realized.cellular_rate_at(view.segment));

  const bool have_cache = kind_ == SchemeKind::Prefetch && cache_ &&
                          cache_->segment == view.segment;
  if (!have_cache) return equal_share(streams, Source::OriginViaBackhaul, seg.adsl_mbps);

  TransferPlan plan;
  plan.streams.resize(streams.size());
  std::size_t from_origin = 0;
  std::size_t from_cache = 0;
  for (std::size_t i = 0; i < streams.size(); ++i) {
    const auto& s = streams[i];
    if (s.complete()) continue;
    const auto& entry = cache_->entries[i];
    const double frontier = s.received_frontier();
    auto& out = plan.streams[i];
    if (frontier < entry.cache_start_offset) {
      out = {Source::OriginViaBackhaul, 0.0, entry.cache_start_offset - frontier};
      ++from_origin;
    } else if (frontier < entry.end_offset()) {
      out = {Source::LocalCache, 0.0, entry.end_offset() - frontier};
      ++from_cache;
    } else {
      out = {Source::OriginViaBackhaul, 0.0, s.remaining_bytes()};
      ++from_origin;
    }
  }
  const std::size_t active = from_origin + from_cache;
  if (active == 0) return plan;

  // Max-min fair split of the WiFi link, with origin fetches additionally
  // bounded by the backhaul. With no cache readers the backhaul alone sets
  // the rate, as for wifi-noprefetch.
  double origin_rate = 0.0;
  double cache_rate = 0.0;
  const double fair = seg.wifi_mbps / static_cast<double>(active);
  if (from_cache == 0) {
    origin_rate = seg.adsl_mbps / static_cast<double>(from_origin);
  } else if (static_cast<double>(from_origin) * fair <= seg.adsl_mbps) {
    origin_rate = fair;
    cache_rate = fair;
  } else {
    origin_rate = seg.adsl_mbps / static_cast<double>(from_origin);
    cache_rate = (seg.wifi_mbps - seg.adsl_mbps) / static_cast<double>(from_cache);
  }
  for (auto& out : plan.streams) {
    if (out.source == Source::OriginViaBackhaul) out.rate_mbps = origin_rate;
    if (out.source == Source::LocalCache) out.rate_mbps = cache_rate;
  }
  return plan;
}

std::vector<double> SchemeController::cache_fill_rates(const RunView& view) const {
  if (!cache_ || !cache_->filling) return {};
  std::vector<double> rates(view.streams.size(), 0.0);
  std::size_t filling = 0;
  for (std::size_t i = 0; i < view.streams.size(); ++i) {
    if (cache_->entries[i].end_offset() < view.streams[i].total_bytes()) ++filling;
  }
  if (filling == 0) return rates;
  const double share = view.realized.segments[cache_->segment].adsl_mbps / static_cast<double>(filling);
  for (std::size_t i = 0; i < view.streams.size(); ++i) {
    if (cache_->entries[i].end_offset() < view.streams[i].total_bytes()) rates[i] = share;
  }
  return rates;
}

void SchemeController::fill_caches(const RunView& view, double dt_s) {
  const auto rates = cache_fill_rates(view);
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] <= 0.0) continue;
    auto& entry = cache_->entries[i];
    const double room = view.streams[i].total_bytes() - entry.end_offset();
    entry.cached_bytes += std::min(rates[i] * dt_s * kBytesPerMbit, room);
  }
}

double SchemeController::time_to_fill_event(const RunView& view) const {
  const auto rates = cache_fill_rates(view);
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] <= 0.0) continue;
    const double room = view.streams[i].total_bytes() - cache_->entries[i].end_offset();
    t = std::min(t, room / (rates[i] * kBytesPerMbit));
  }
  return t;
}

}  // namespace prefetchsim
