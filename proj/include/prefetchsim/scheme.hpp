// scheme.hpp
//
// Access policies deciding, at every instant, where each stream's bytes come
// from and how fast:
//
//   mobile-only      origin over cellular, everywhere
//   wifi-noprefetch  origin over cellular outside hotspots, origin over the
//                    hotspot backhaul inside
//   wifi-prefetch    as above, but the next hotspot's cache is told to start
//                    pulling each stream from the position playback is
//                    predicted to have reached on arrival. Inside the hotspot
//                    the node fetches (1) the gap up to the cached range from
//                    the origin, (2) the cached bytes at WiFi speed, then (3)
//                    continues from the origin until it leaves.
//
// Capacity is split equally among streams that still need bytes.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "prefetchsim/playout.hpp"
#include "prefetchsim/route.hpp"
#include "prefetchsim/video_trace.hpp"

namespace prefetchsim {

enum class SchemeKind { MobileOnly, OpportunisticWiFi, Prefetch };

inline constexpr SchemeKind kAllSchemes[] = {SchemeKind::MobileOnly,
                                             SchemeKind::OpportunisticWiFi, SchemeKind::Prefetch};

/// `mobile-only` | `wifi-noprefetch` | `wifi-prefetch`
std::string_view to_token(SchemeKind kind);
/// Throws std::invalid_argument on an unknown token.
SchemeKind parse_scheme(std::string_view token);

enum class Source { OriginViaCellular, OriginViaBackhaul, LocalCache, None };

std::string_view to_string(Source source);

struct StreamTransfer {
  Source source = Source::None;
  double rate_mbps = 0.0;
  /// Bytes after which this assignment changes (phase goal or end of stream).
  double goal_bytes = 0.0;
};

struct TransferPlan {
  std::vector<StreamTransfer> streams;
};

struct CacheEntry {
  double cache_start_offset = 0.0;
  double cached_bytes = 0.0;

  double end_offset() const { return cache_start_offset + cached_bytes; }
};

struct HotspotCache {
  std::size_t segment = 0;  // 0-based segment index of the hotspot
  double instruct_time_s = 0.0;
  double predicted_travel_s = 0.0;
  bool filling = true;
  std::vector<CacheEntry> entries;  // one per stream
};

/// Read-only view of a run handed to the policy.
struct RunView {
  const Route& nominal;
  const RealizedRoute& realized;
  std::size_t segment;  // current realized segment
  std::span<const StreamState> streams;
};

/// Byte position playback is predicted to reach after travelling for
/// t_next_wifi_s at the estimated playout rate.
double estimate_offset(const EwmaRate& ewma, double t_next_wifi_s, double current_position);

/// Nominal cellular throughput available in segment k (WiFi segments inherit
/// the closest preceding cellular segment).
double nominal_cellular_mbps(const Route& route, std::size_t k);

/// First WiFi segment after `from` whose nominal WiFi throughput beats the
/// nominal cellular throughput at `from`.
std::optional<std::size_t> next_qualifying_hotspot(const Route& route, std::size_t from);

class SchemeController {
 public:
  explicit SchemeController(SchemeKind kind) : kind_(kind) {}

  SchemeKind kind() const { return kind_; }

  /// Run start and every WiFi -> cellular transition. Prefetch only: issues a
  /// cache instruction for the next qualifying hotspot unless one is pending.
  /// Returns the cache now targeted, if any.
  const HotspotCache* on_exit_wifi(const RunView& view, double now_s);

  /// Entering a WiFi segment stops the fill of that hotspot's cache.
  void on_enter_wifi(const RunView& view, double now_s);

  /// Transfer assignment for the current instant.
  TransferPlan plan_tick(const RunView& view) const;

  /// Per-stream cache fill rates (Mbps) at this instant; empty when no cache
  /// is filling.
  std::vector<double> cache_fill_rates(const RunView& view) const;

  /// Advances cache fill by dt_s at the current rates.
  void fill_caches(const RunView& view, double dt_s);

  /// Time until some stream's cache reaches the end of its stream at the
  /// current fill rates (infinity when nothing fills).
  double time_to_fill_event(const RunView& view) const;

  const std::optional<HotspotCache>& cache() const { return cache_; }

 private:
  SchemeKind kind_;
  std::optional<HotspotCache> cache_;
};

}  // namespace prefetchsim
