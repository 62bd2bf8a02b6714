// prefetchsim: command-line front end.
//
//   prefetchsim run       one scenario per selected scheme
//   prefetchsim sweep     one parameter axis x selected schemes
//   prefetchsim reproduce every predefined sweep, one CSV per table
//
// Flags mirror config-file keys and override them. PREFETCHSIM_SEED is used
// as the base seed when neither the file nor a flag sets one.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prefetchsim/engine.hpp"
#include "prefetchsim/report.hpp"
#include "prefetchsim/sweep_spec.hpp"

namespace fs = std::filesystem;
using namespace prefetchsim;

namespace {

// Scenario flags, applied in declaration order on top of the config file.
class FlagSet {
 public:

  void attach(CLI::App& app, std::string& config_path, bool with_axis) {
    app.add_option("--config", config_path, "key=value config file");
    for (const char* name :
         {"scheme", "streams", "hotspots", "time-var", "thr-var", "scale-m", "scale-w", "scale-a",
          "trace", "synth", "synth-seed", "route", "runs", "seed", "tick", "threshold-frames",
          "warmup-s", "ewma-weight", "cellular-j-per-mb", "cellular-idle-w", "wifi-j-per-mb",
          "wifi-idle-w", "out", "format", "jobs"}) {
      add(app, name);
    }
    if (with_axis) {
      add(app, "axis");
      add(app, "values");
    }
    app.add_flag("--timeline", timeline_, "write a per-tick log of run 0 of each scenario");
  }

  void apply(SweepSpec& spec) const {
    for (const auto& key : order_) {
      if (passed_.at(key)->count() > 0) apply_setting(spec, key, storage_.at(key));
    }
    if (timeline_) apply_setting(spec, "timeline", "true");
  }

 private:
  void add(CLI::App& app, const std::string& name) {
    order_.push_back(name);
    auto& slot = storage_[name];
    passed_[name] = app.add_option("--" + name, slot);
  }

  std::vector<std::string> order_;
  bool timeline_ = false;
  std::map<std::string, std::string> storage_;
  std::map<std::string, CLI::Option*> passed_;
};

SweepSpec load_spec(const std::string& config_path, const FlagSet& flags) {
  SweepSpec spec;
  if (const char* env = std::getenv("PREFETCHSIM_SEED"); env && *env)
    apply_setting(spec, "seed", env);
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(spec, buf.str(), config_path);
  }
  flags.apply(spec);
  finalize(spec);
  return spec;
}

void write_timelines(const SweepSpec& spec, const std::vector<ScenarioConfig>& configs,
                     const std::string& stem) {
  for (const auto& c : configs) {
    RunResult r = run_once(c, 0, RunOptions{.timeline = true});
    std::string name = stem + "_timeline_" + std::string(to_token(c.scheme));
    if (spec.axis != Axis::None) name += "_" + format_number(axis_value(c, spec.axis));
    std::ofstream out(name + ".csv");
    if (!out) throw std::runtime_error("cannot write " + name + ".csv");
    write_timeline(r, out);
  }
}

std::vector<ScenarioResult> execute(const SweepSpec& spec, const std::vector<ScenarioConfig>& configs) {
  std::vector<ScenarioResult> results;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    results.push_back(run_scenario(configs[i], spec.jobs));
    std::cerr << "[" << i + 1 << "/" << configs.size() << "] " << to_token(configs[i].scheme);
    if (spec.axis != Axis::None)
      std::cerr << " " << to_token(spec.axis) << "=" << format_number(axis_value(configs[i], spec.axis));
    std::cerr << " paused=" << results.back().paused.mean << " energy_j=" << results.back().energy_j.mean
              << '\n';
  }
  return results;
}

void emit(const SweepSpec& spec, const std::vector<ScenarioResult>& results) {
  if (spec.out.empty()) {
    emit_results(results, spec, spec.format, std::cout);
  } else {
    emit_results(results, spec, spec.format, fs::path(spec.out));
  }
}

int cmd_single(const SweepSpec& spec) {
  const auto configs = expand(spec);
  if (spec.timeline) {
    const std::string stem = spec.out.empty() ? "prefetchsim" : fs::path(spec.out).replace_extension().string();
    write_timelines(spec, configs, stem);
  }
  emit(spec, execute(spec, configs));
  return 0;
}

struct Preset {
  const char* name;
  Axis axis;
  TraceKind trace;
};

constexpr Preset kPresets[] = {
    {"streams_hd", Axis::Streams, TraceKind::SynthHd},
    {"streams_sd", Axis::Streams, TraceKind::SynthSd},
    {"hotspots_hd", Axis::Hotspots, TraceKind::SynthHd},
    {"hotspots_sd", Axis::Hotspots, TraceKind::SynthSd},
    {"mobile_throughput_hd", Axis::MobileScale, TraceKind::SynthHd},
    {"wifi_throughput_hd", Axis::WifiScale, TraceKind::SynthHd},
    {"adsl_throughput_hd", Axis::AdslScale, TraceKind::SynthHd},
    {"time_variability_hd", Axis::TimeVar, TraceKind::SynthHd},
    {"throughput_variability_hd", Axis::ThrVar, TraceKind::SynthHd},
};

int cmd_reproduce(const std::string& config_path, const FlagSet& flags) {
  const SweepSpec common = load_spec(config_path, flags);
  const fs::path dir = common.out.empty() ? fs::path("results") : fs::path(common.out);
  fs::create_directories(dir);
  for (const auto& preset : kPresets) {
    SweepSpec spec = common;
    spec.axis = preset.axis;
    spec.axis_values.clear();
    spec.explicit_keys.erase("values");
    spec.trace_kind = preset.trace;
    spec.trace_path.clear();
    if (preset.trace == TraceKind::SynthSd) {
      spec.explicit_keys.erase("streams");
    } else if (!common.explicit_keys.contains("streams")) {
      spec.base.num_streams = 4;
    }
    finalize(spec);
    std::cerr << "== " << preset.name << '\n';
    const auto results = execute(spec, expand(spec));
    const auto ext = spec.format == OutputFormat::Json ? ".json" : ".csv";
    emit_results(results, spec, spec.format, dir / (std::string(preset.name) + ext));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulator of video streaming over cellular + WiFi with hotspot prefetching"};
  app.require_subcommand(1);

  std::string run_config, sweep_config, repro_config;
  FlagSet run_flags, sweep_flags, repro_flags;
  auto* run = app.add_subcommand("run", "simulate one scenario per selected scheme");
  run_flags.attach(*run, run_config, false);
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one parameter axis");
  sweep_flags.attach(*sweep_cmd, sweep_config, true);
  auto* repro = app.add_subcommand("reproduce", "run every predefined sweep into --out DIR");
  repro_flags.attach(*repro, repro_config, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      SweepSpec spec = load_spec(run_config, run_flags);
      if (spec.axis != Axis::None) throw ConfigError("'run' takes no axis; use 'sweep'");
      return cmd_single(spec);
    }
    if (*sweep_cmd) {
      SweepSpec spec = load_spec(sweep_config, sweep_flags);
      if (spec.axis == Axis::None) throw ConfigError("'sweep' needs an axis (--axis or axis=...)");
      return cmd_single(spec);
    }
    if (*repro) return cmd_reproduce(repro_config, repro_flags);
  } catch (const std::exception& e) {
    std::cerr << "prefetchsim: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
