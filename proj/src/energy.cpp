#include "prefetchsim/energy.hpp"

#include <stdexcept>

namespace prefetchsim {

void EnergyModel::validate() const {
  if (!(cellular_j_per_mb >= 0.0) || !(cellular_idle_w >= 0.0) || !(wifi_j_per_mb >= 0.0) ||
      !(wifi_idle_w >= 0.0))
    throw std::invalid_argument("energy model fields must be non-negative");
}

double energy_joules(const EnergyAccount& acct, const EnergyModel& model) {
  return acct.cellular_mb * model.cellular_j_per_mb + acct.wifi_mb * model.wifi_j_per_mb +
         (acct.wifi_on_s - acct.wifi_transfer_s) * model.wifi_idle_w +
         (acct.cellular_on_s - acct.cellular_transfer_s) * model.cellular_idle_w;
}

EnergyAccount accumulate(EnergyAccount acct, const EnergyModel& model, Interface iface, double mb,
                         double on_s, double transfer_s) {
  if (!(mb >= 0.0) || !(on_s >= 0.0) || !(transfer_s >= 0.0))
    throw std::invalid_argument("energy counters cannot decrease");
  if (transfer_s > on_s) throw std::invalid_argument("transfer time exceeds on time");
  if (iface == Interface::Cellular) {
    acct.cellular_mb += mb;
    acct.cellular_on_s += on_s;
    acct.cellular_transfer_s += transfer_s;
  } else {
    acct.wifi_mb += mb;
    acct.wifi_on_s += on_s;
    acct.wifi_transfer_s += transfer_s;
  }
  acct.total_j = energy_joules(acct, model);
  return acct;
}

}  // namespace prefetchsim
