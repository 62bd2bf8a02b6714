#include "prefetchsim/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace prefetchsim {

namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string axis_text(const ScenarioResult& r, Axis axis) {
  return axis == Axis::None ? std::string("-") : format_number(axis_value(r.config, axis));
}

}  // namespace

void emit_results(std::span<const ScenarioResult> results, const SweepSpec& spec,
                  OutputFormat format, std::ostream& out) {
  if (results.empty()) throw std::invalid_argument("no results to emit");

  if (format == OutputFormat::Json) {
    auto records = nlohmann::ordered_json::array();
    for (const auto& r : results) {
      nlohmann::ordered_json rec;
      if (spec.axis == Axis::None) {
        rec["axis_value"] = nullptr;
      } else {
        rec["axis_value"] = axis_value(r.config, spec.axis);
      }
      rec["scheme"] = std::string(to_token(r.config.scheme));
      rec["paused_mean"] = r.paused.mean;
      rec["paused_ci95"] = r.paused.ci95;
      rec["energy_mean_j"] = r.energy_j.mean;
      rec["energy_ci95_j"] = r.energy_j.ci95;
      rec["runs"] = r.runs;
      records.push_back(std::move(rec));
    }
    out << records.dump(2) << '\n';
    return;
  }

  for (const auto& line : echo_lines(spec)) out << "# " << line << '\n';
  out << kResultColumns << '\n';
  for (const auto& r : results) {
    out << axis_text(r, spec.axis) << ',' << to_token(r.config.scheme) << ','
        << fixed(r.paused.mean) << ',' << fixed(r.paused.ci95) << ',' << fixed(r.energy_j.mean)
        << ',' << fixed(r.energy_j.ci95) << ',' << r.runs << '\n';
  }
}

void emit_results(std::span<const ScenarioResult> results, const SweepSpec& spec,
                  OutputFormat format, const std::filesystem::path& path) {
  if (results.empty()) throw std::invalid_argument("no results to emit");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  emit_results(results, spec, format, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_timeline(const RunResult& run, std::ostream& out) {
  out << "time_s,stream,source,rate_mbps,frontier_bytes,next_frame,paused_total\n";
  for (const auto& row : run.timeline) {
    out << fixed(row.time_s, 4) << ',' << row.stream << ',' << to_string(row.source) << ','
        << fixed(row.rate_mbps) << ',' << fixed(row.frontier_bytes, 1) << ',' << row.next_frame
        << ',' << row.paused_total << '\n';
  }
}

}  // namespace prefetchsim
