// route.hpp
//
// Nominal route geometry, the SNR -> (WiFi, ADSL) throughput calibration,
// hotspot placement, and per-run sampling of timing / throughput error.
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prefetchsim/rng.hpp"

namespace prefetchsim {

enum class Access { Cellular, WiFi };

std::string_view to_string(Access access);

struct LinkRates {
  double wifi_mbps = 0.0;
  double adsl_mbps = 0.0;

  bool operator==(const LinkRates&) const = default;
};

/// One row of the SNR calibration. The row covers (snr_lower_db, snr_upper_db];
/// infinite bounds are used for the open-ended rows.
struct SnrRow {
  double snr_lower_db;
  double snr_upper_db;
  double wifi_mbps;
  double adsl_mbps;
};

class SnrCalibrationTable {
 public:
  /// Rows must be ordered by descending SNR and tile the real line.
  explicit SnrCalibrationTable(std::vector<SnrRow> rows);

  /// Calibration measured at open outdoor hotspots.
  static SnrCalibrationTable defaults();

  const std::vector<SnrRow>& rows() const { return rows_; }

 private:
  std::vector<SnrRow> rows_;
};

LinkRates snr_to_throughput(double snr_db, const SnrCalibrationTable& table);

struct Segment {
  int index = 0;  // 1-based
  Access access = Access::Cellular;
  double nominal_start_s = 0.0;
  double nominal_duration_s = 0.0;
  double cellular_mbps = 0.0;  // Cellular segments only
  double wifi_mbps = 0.0;      // WiFi segments only
  double adsl_mbps = 0.0;      // WiFi segments only

  double nominal_end_s() const { return nominal_start_s + nominal_duration_s; }
  bool operator==(const Segment&) const = default;
};

struct Route {
  std::vector<Segment> segments;
  double wifi_warmup_s = 20.0;

  double nominal_end_s() const;
  /// Throws std::invalid_argument on a broken route.
  void validate() const;
};

inline constexpr int kSegmentCount = 16;
inline constexpr double kSegmentDurationS = 18.0;

/// The 16 x 18 s route with 2, 4 or 8 hotspots; throughputs multiplied by the
/// per-technology scale factors.
Route build_route(int num_hotspots, double scale_m = 1.0, double scale_w = 1.0,
                  double scale_a = 1.0);

/// Multiplies every throughput of `route` by the matching scale factor.
Route scale_route(Route route, double scale_m, double scale_w, double scale_a);

struct RealizedSegment {
  Access access = Access::Cellular;
  double start_s = 0.0;
  double end_s = 0.0;
  double cellular_mbps = 0.0;
  double wifi_mbps = 0.0;
  double adsl_mbps = 0.0;

  bool operator==(const RealizedSegment&) const = default;
};

struct RealizedRoute {
  /// boundaries_s[k] is the realized start of segment k; the last entry is the
  /// route end. size() == segments.size() + 1.
  std::vector<double> boundaries_s;
  std::vector<RealizedSegment> segments;

  double end_s() const { return boundaries_s.back(); }
  /// Segment containing time t (the last one for t >= end).
  std::size_t segment_at(double t_s) const;
  /// Realized cellular rate usable inside segment k. WiFi segments inherit the
  /// nearest preceding cellular segment.
  double cellular_rate_at(std::size_t k) const;

  bool operator==(const RealizedRoute&) const = default;
};

/// Timing: one per-run speed factor drawn uniformly from [1 - time_var,
/// 1 + time_var] stretches every segment, so each boundary t falls in
/// [(1 - time_var) t, (1 + time_var) t]; durations are clamped to >= 1 s.
/// Throughputs: drawn independently per segment, uniformly within +-thr_var
/// of nominal, and held for the whole run.
RealizedRoute sample_realization(const Route& route, double time_var, double thr_var, Rng& rng);

/// Header `index,access,start_s,cellular_mbps,wifi_mbps,adsl_mbps`; a final row
/// with access `end` gives the route end time.
Route load_route_csv(const std::filesystem::path& path);

/// Header `snr_lower_db,snr_upper_db,wifi_mbps,adsl_mbps`; `-inf` / `inf`
/// accepted for the open rows.
SnrCalibrationTable load_calibration_csv(const std::filesystem::path& path);

}  // namespace prefetchsim
