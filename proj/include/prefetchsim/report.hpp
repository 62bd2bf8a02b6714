// report.hpp
//
// Result tables. CSV columns:
//   axis_value,scheme,paused_mean,paused_ci95,energy_mean_j,energy_ci95_j,runs
// preceded by `# key=value` lines echoing the scenario settings. JSON output
// is an array of objects with the same field names.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "prefetchsim/engine.hpp"
#include "prefetchsim/sweep_spec.hpp"

namespace prefetchsim {

inline constexpr std::string_view kResultColumns =
    "axis_value,scheme,paused_mean,paused_ci95,energy_mean_j,energy_ci95_j,runs";

/// Throws std::invalid_argument when `results` is empty.
void emit_results(std::span<const ScenarioResult> results, const SweepSpec& spec,
                  OutputFormat format, std::ostream& out);

/// Writes to `path`. Throws std::runtime_error if it cannot be written.
void emit_results(std::span<const ScenarioResult> results, const SweepSpec& spec,
                  OutputFormat format, const std::filesystem::path& path);

/// Per-tick CSV: time_s,stream,source,rate_mbps,frontier_bytes,next_frame,paused_total
void write_timeline(const RunResult& run, std::ostream& out);

}  // namespace prefetchsim
