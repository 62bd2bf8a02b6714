// energy.hpp
//
// Two-state radio energy model: a per-megabyte transfer cost per interface and
// an idle power while the interface is on but not transferring.
// One megabyte is 10^6 bytes.
#pragma once

namespace prefetchsim {

struct EnergyModel {
  double cellular_j_per_mb = 100.0;
  double cellular_idle_w = 0.0;
  double wifi_j_per_mb = 5.0;
  double wifi_idle_w = 0.77;

  void validate() const;
};

enum class Interface { Cellular, WiFi };

struct EnergyAccount {
  double cellular_mb = 0.0;
  double wifi_mb = 0.0;
  double wifi_on_s = 0.0;
  double wifi_transfer_s = 0.0;
  // Cellular idle power defaults to zero; these only matter when it is not.
  double cellular_on_s = 0.0;
  double cellular_transfer_s = 0.0;
  double total_j = 0.0;

  bool operator==(const EnergyAccount&) const = default;
};

/// Recomputes total_j from the counters.
double energy_joules(const EnergyAccount& acct, const EnergyModel& model);

/// Adds `mb` transferred over `iface` plus `on_s` seconds of interface on-time,
/// `transfer_s` of which were spent transferring. Throws std::invalid_argument on negative input
/// or transfer_s > on_s.
EnergyAccount accumulate(EnergyAccount acct, const EnergyModel& model, Interface iface, double mb,
                         double on_s, double transfer_s);

}  // namespace prefetchsim
