#include "prefetchsim/route.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "text_util.hpp"

namespace prefetchsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TableRow {
  Access access;
  double cellular_mbps;
  LinkRates wifi;
};

// Measured route with four hotspots. Segment k starts at 18 * (k - 1) s.
constexpr TableRow kMeasuredRoute[kSegmentCount] = {
    {Access::Cellular, 4.83, {}},
    {Access::WiFi, 0.0, {16.16, 6.81}},
    {Access::Cellular, 4.22, {}},
    {Access::Cellular, 4.58, {}},
    {Access::Cellular, 4.58, {}},
    {Access::WiFi, 0.0, {16.74, 8.37}},
    {Access::Cellular, 6.48, {}},
    {Access::Cellular, 6.72, {}},
    {Access::Cellular, 6.72, {}},
    {Access::WiFi, 0.0, {16.74, 8.37}},
    {Access::Cellular, 4.72, {}},
    {Access::Cellular, 4.72, {}},
    {Access::Cellular, 6.51, {}},
    {Access::WiFi, 0.0, {17.23, 9.46}},
    {Access::Cellular, 5.82, {}},
    {Access::Cellular, 5.82, {}},
};

// Hotspots that are not part of the measured layout sit in the (-90, -80] dB
// bucket, the most common one on the measured route.
constexpr double kExtraHotspotSnrDb = -85.0;

std::vector<int> hotspot_segments(int num_hotspots) {
  switch (num_hotspots) {
    case 2:
      return {2, 10};
    case 4:
      return {2, 6, 10, 14};
    case 8:
      return {2, 4, 6, 8, 10, 12, 14, 16};
    default:
      throw std::invalid_argument("number of hotspots must be 2, 4 or 8, got " +
                                  std::to_string(num_hotspots));
  }
}

[[noreturn]] void csv_error(const std::filesystem::path& path, std::size_t line,
                            const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::string_view to_string(Access access) {
  return access == Access::Cellular ? "cellular" : "wifi";
}

SnrCalibrationTable::SnrCalibrationTable(std::vector<SnrRow> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("SNR calibration table is empty");
  if (rows_.front().snr_upper_db != kInf || rows_.back().snr_lower_db != -kInf)
    throw std::invalid_argument("SNR calibration table must be unbounded at both ends");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    if (!(row.snr_lower_db < row.snr_upper_db))
      throw std::invalid_argument("SNR calibration row has an empty interval");
    if (i > 0 && rows_[i - 1].snr_lower_db != row.snr_upper_db)
      throw std::invalid_argument("SNR calibration rows must be contiguous and descending");
    if (!(row.wifi_mbps > 0.0) || !(row.adsl_mbps > 0.0))
      throw std::invalid_argument("SNR calibration throughputs must be positive");
  }
}

SnrCalibrationTable SnrCalibrationTable::defaults() {
  return SnrCalibrationTable({
      {-50.0, kInf, 19.90, 15.87},
      {-60.0, -50.0, 18.30, 11.86},
      {-70.0, -60.0, 17.76, 10.13},
      {-80.0, -70.0, 17.23, 9.46},
      {-90.0, -80.0, 16.74, 8.37},
      {-kInf, -90.0, 16.16, 6.81},
  });
}

LinkRates snr_to_throughput(double snr_db, const SnrCalibrationTable& table) {
  for (const auto& row : table.rows()) {
    if (snr_db > row.snr_lower_db && snr_db <= row.snr_upper_db)
      return {row.wifi_mbps, row.adsl_mbps};
  }
  // Only NaN gets here.
  throw std::invalid_argument("SNR value is not a number");
}

double Route::nominal_end_s() const {
  return segments.empty() ? 0.0 : segments.back().nominal_end_s();
}

void Route::validate() const {
  if (segments.empty()) throw std::invalid_argument("route has no segments");
  if (segments.front().access != Access::Cellular)
    throw std::invalid_argument("route must start with a cellular segment");
  if (segments.front().nominal_start_s != 0.0)
    throw std::invalid_argument("route must start at t = 0");
  if (!(wifi_warmup_s >= 0.0)) throw std::invalid_argument("WiFi warm-up must be >= 0");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    if (!(seg.nominal_duration_s > 0.0))
      throw std::invalid_argument("segment " + std::to_string(seg.index) +
                                  " has non-positive duration");
    if (seg.access == Access::Cellular) {
      if (!(seg.cellular_mbps > 0.0) || seg.wifi_mbps != 0.0 || seg.adsl_mbps != 0.0)
        throw std::invalid_argument("cellular segment " + std::to_string(seg.index) +
                                    " needs exactly a positive cellular throughput");
    } else {
      if (seg.cellular_mbps != 0.0 || !(seg.wifi_mbps > 0.0) || !(seg.adsl_mbps > 0.0))
        throw std::invalid_argument("WiFi segment " + std::to_string(seg.index) +
                                    " needs exactly positive WiFi and ADSL throughputs");
    }
    if (i > 0) {
      const auto& prev = segments[i - 1];
      if (std::abs(prev.nominal_end_s() - seg.nominal_start_s) > 1e-9)
        throw std::invalid_argument("segment " + std::to_string(seg.index) +
                                    " does not start where the previous one ends");
      if (prev.access == Access::WiFi && seg.access == Access::WiFi)
        throw std::invalid_argument("adjacent WiFi segments are not allowed");
    }
  }
}

Route scale_route(Route route, double scale_m, double scale_w, double scale_a) {
  if (!(scale_m > 0.0) || !(scale_w > 0.0) || !(scale_a > 0.0))
    throw std::invalid_argument("throughput scale factors must be positive");
  for (auto& seg : route.segments) {
    seg.cellular_mbps *= scale_m;
    seg.wifi_mbps *= scale_w;
    seg.adsl_mbps *= scale_a;
  }
  return route;
}

Route build_route(int num_hotspots, double scale_m, double scale_w, double scale_a) {
  const auto wifi_at = hotspot_segments(num_hotspots);
  const auto extra = snr_to_throughput(kExtraHotspotSnrDb, SnrCalibrationTable::defaults());

  Route route;
  double last_cellular = 0.0;
  for (int k = 1; k <= kSegmentCount; ++k) {
    const auto& measured = kMeasuredRoute[k - 1];
    Segment seg;
    seg.index = k;
    seg.nominal_start_s = (k - 1) * kSegmentDurationS;
    seg.nominal_duration_s = kSegmentDurationS;
    const bool is_wifi = std::find(wifi_at.begin(), wifi_at.end(), k) != wifi_at.end();
    if (is_wifi) {
      seg.access = Access::WiFi;
      const auto rates = measured.access == Access::WiFi ? measured.wifi : extra;
      seg.wifi_mbps = rates.wifi_mbps;
      seg.adsl_mbps = rates.adsl_mbps;
    } else {
      seg.access = Access::Cellular;
      // A measured hotspot dropped from the layout keeps the coverage of the
      // cellular segment before it.
      seg.cellular_mbps =
          measured.access == Access::Cellular ? measured.cellular_mbps : last_cellular;
    }
    if (measured.access == Access::Cellular) last_cellular = measured.cellular_mbps;
    route.segments.push_back(seg);
  }
  return scale_route(std::move(route), scale_m, scale_w, scale_a);
}

std::size_t RealizedRoute::segment_at(double t_s) const {
  const auto it = std::upper_bound(boundaries_s.begin() + 1, boundaries_s.end() - 1, t_s);
  return static_cast<std::size_t>(it - (boundaries_s.begin() + 1));
}

double RealizedRoute::cellular_rate_at(std::size_t k) const {
  for (std::size_t i = k + 1; i-- > 0;) {
    if (segments[i].access == Access::Cellular) return segments[i].cellular_mbps;
  }
  return 0.0;
}

RealizedRoute sample_realization(const Route& route, double time_var, double thr_var, Rng& rng) {
  if (!(time_var >= 0.0 && time_var < 1.0))
    throw std::invalid_argument("time variability must be in [0, 1)");
  if (!(thr_var >= 0.0 && thr_var < 1.0))
    throw std::invalid_argument("throughput variability must be in [0, 1)");
  route.validate();

  const std::size_t n = route.segments.size();

  // One speed factor per run: every boundary t lands in [(1-v) t, (1+v) t]
  // and the whole trip is uniformly faster or slower than predicted.
  const double speed = rng.uniform(1.0 - time_var, 1.0 + time_var);
  RealizedRoute out;
  out.boundaries_s.reserve(n + 1);
  out.boundaries_s.push_back(0.0);
  for (const auto& seg : route.segments) {
    const double realized = std::max(speed * seg.nominal_duration_s, 1.0);
    out.boundaries_s.push_back(out.boundaries_s.back() + realized);
  }

  auto draw = [&](double nominal) {
    return rng.uniform((1.0 - thr_var) * nominal, (1.0 + thr_var) * nominal);
  };
  out.segments.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& seg = route.segments[k];
    RealizedSegment r;
    r.access = seg.access;
    r.start_s = out.boundaries_s[k];
    r.end_s = out.boundaries_s[k + 1];
    if (seg.access == Access::Cellular) {
      r.cellular_mbps = draw(seg.cellular_mbps);
    } else {
      r.wifi_mbps = draw(seg.wifi_mbps);
      r.adsl_mbps = draw(seg.adsl_mbps);
    }
    out.segments.push_back(r);
  }
  return out;
}

Route load_route_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open route file " + path.string());

  struct Row {
    int index;
    std::string access;
    double start;
    double cellular, wifi, adsl;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header_seen) {
      if (text != "index,access,start_s,cellular_mbps,wifi_mbps,adsl_mbps")
        csv_error(path, line_no, "unexpected header");
      header_seen = true;
      continue;
    }
    const auto cols = detail::split(text, ',');
    if (cols.size() != 6) csv_error(path, line_no, "expected 6 columns");
    const auto index = detail::parse_int(cols[0]);
    const auto start = detail::parse_double(cols[2]);
    if (!index || !start) csv_error(path, line_no, "bad index or start_s");
    auto optional_rate = [&](std::string_view col) {
      if (col.empty()) return 0.0;
      const auto v = detail::parse_double(col);
      if (!v) csv_error(path, line_no, "bad throughput '" + std::string(col) + "'");
      return *v;
    };
    rows.push_back({static_cast<int>(*index), std::string(cols[1]), *start,
                     optional_rate(cols[3]), optional_rate(cols[4]), optional_rate(cols[5])});
  }
  if (rows.size() < 2 || rows.back().access != "end")
    throw std::runtime_error(path.string() + ": route needs segments and a final 'end' row");

  Route route;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto& r = rows[i];
    Segment seg;
    seg.index = r.index;
    if (r.access == "cellular" || r.access == "mobile") {
      seg.access = Access::Cellular;
    } else if (r.access == "wifi") {
      seg.access = Access::WiFi;
    } else {
      throw std::runtime_error(path.string() + ": unknown access '" + r.access + "'");
    }
    seg.nominal_start_s = r.start;
    seg.nominal_duration_s = rows[i + 1].start - r.start;
    seg.cellular_mbps = r.cellular;
    seg.wifi_mbps = r.wifi;
    seg.adsl_mbps = r.adsl;
    route.segments.push_back(seg);
  }
  route.validate();
  return route;
}

SnrCalibrationTable load_calibration_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open calibration file " + path.string());
  std::vector<SnrRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header_seen) {
      if (text != "snr_lower_db,snr_upper_db,wifi_mbps,adsl_mbps")
        csv_error(path, line_no, "unexpected header");
      header_seen = true;
      continue;
    }
    const auto cols = detail::split(text, ',');
    if (cols.size() != 4) csv_error(path, line_no, "expected 4 columns");
    SnrRow row{};
    double* fields[] = {&row.snr_lower_db, &row.snr_upper_db, &row.wifi_mbps, &row.adsl_mbps};
    for (std::size_t c = 0; c < 4; ++c) {
      const auto v = detail::parse_double(cols[c]);
      if (!v) csv_error(path, line_no, "bad number '" + std::string(cols[c]) + "'");
      *fields[c] = *v;
    }
    rows.push_back(row);
  }
  return SnrCalibrationTable(std::move(rows));
}

}  // namespace prefetchsim
