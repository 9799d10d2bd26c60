#pragma once

#include "codesign/empc.hpp"
#include "codesign/thermal.hpp"

namespace codesign {

// Present value of a unit annual payment over `years` at `rate`;
// divides CAPEX to annualise investment cost. rate = 0 returns `years`.
double annuity(double years, double rate);

struct EconomicsSpec {
  double battery_capex_per_kwh = 460.0;
  double pv_capex_per_m2 = 325.0;
  double battery_life_years = 15.0;
  double pv_life_years = 30.0;
  double interest_rate = 0.02;
  double c_b_per_kwh_yr = 0.0;  // derived annualised costs
  double c_pv_per_m2_yr = 0.0;

  static EconomicsSpec from_assets(const AssetParams& assets);
};

// V_I(p) = c_B S^B + c_PV S^PV, GBP per year.
double investment(const SizingParams& p, const EconomicsSpec& econ);

}  // namespace codesign
