#include "codesign/economics.hpp"

#include <cmath>
#include <stdexcept>

namespace codesign {

double annuity(double years, double rate) {
  if (years < 1.0) throw std::invalid_argument("annuity: lifespan must be at least one year");
  if (rate < 0.0) throw std::invalid_argument("annuity: negative interest rate");
  if (rate == 0.0) return years;
  return (1.0 - 1.0 / std::pow(1.0 + rate, years)) / rate;
}

EconomicsSpec EconomicsSpec::from_assets(const AssetParams& assets) {
  EconomicsSpec econ;
  econ.battery_capex_per_kwh = assets.battery_capex_per_kwh;
  econ.pv_capex_per_m2 = assets.pv_capex_per_m2;
  econ.battery_life_years = assets.battery_life_years;
  econ.pv_life_years = assets.pv_life_years;
  econ.interest_rate = assets.interest_rate;
  econ.c_b_per_kwh_yr = econ.battery_capex_per_kwh / annuity(econ.battery_life_years, econ.interest_rate);
  econ.c_pv_per_m2_yr = econ.pv_capex_per_m2 / annuity(econ.pv_life_years, econ.interest_rate);
  return econ;
}

double investment(const SizingParams& p, const EconomicsSpec& econ) {
  return econ.c_b_per_kwh_yr * p.battery_kwh() + econ.c_pv_per_m2_yr * p.pv_m2();
}

}  // namespace codesign
