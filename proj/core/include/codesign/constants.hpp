#pragma once

// Shared numeric tolerances and unit conventions. Single source of truth:
// tests and solvers must reference these rather than re-declaring literals.

namespace codesign {

// Linear-programming tolerances.
inline constexpr double kLpFeasTol = 1e-8;   // max allowed primal bound/row violation
inline constexpr double kLpOptTol = 1e-8;    // reduced-cost threshold for optimality

// Hours in a nominal year used for annualisation, independent of leap years.
inline constexpr double kHoursPerYear = 8760.0;

// Sizing lattice unit sizes: batteries in 1 kWh steps, PV panels in 1.68 m2 modules.
inline constexpr double kBatteryUnitKwh = 1.0;
inline constexpr double kPvUnitM2 = 1.68;

// Sell price is a fixed fraction of the buy price.
inline constexpr double kSellPriceRatio = 0.9;

// Carbon price: 100 GBP/tonne expressed per kg, so c_em [kg/kWh] prices in GBP/kWh.
inline constexpr double kCarbonPricePerKg = 0.1;

}  // namespace codesign
