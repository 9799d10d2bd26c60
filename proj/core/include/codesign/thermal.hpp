#pragma once

#include "codesign/timeseries.hpp"

namespace codesign {

// Single-zone lumped-capacitance dwelling. Defaults follow the reference
// three-bedroom case study; units converted at load time to a consistent
// (kW, kWh, h, degC) system.
struct BuildingParams {
  double u_value_w_m2k = 0.93195;    // average U-value, W/(m2 K)
  double wall_area_m2 = 82.06959707;
  double air_density_kg_m3 = 1.225;
  double volume_m3 = 224.05;
  double air_heat_capacity_kj_kgk = 1.005;
  double air_changes_per_h = 1.0;
  double thermal_mass_kj_k = 15286.6114;
  double floor_area_m2 = 89.62;
  double heat_pump_elec_max_kw = 4.0;  // electrical input bound
  double cool_pump_elec_max_kw = 6.0;
  double heat_pump_capacity_kw = 6.0;  // thermal output bound

  void validate() const;
};

// Battery, PV and pricing parameters of the asset problem.
struct AssetParams {
  double cop_slope_per_c = 0.067;  // heat-pump COP slope vs external temperature
  double cop_cool = 0.7;
  double eta_charge = 0.88;
  double eta_discharge = 0.88;
  double discharge_hours = 2.0;       // T_ds: hours to drain a full battery at max rate
  double buy_max_kw = 30.0;
  double sell_max_kw = 30.0;
  double soc_max_kwh = 60.0;          // largest admissible battery
  double pv_theta1 = 0.12;            // nominal PV efficiency
  double pv_theta2_per_w_m2 = -1.345e-4;  // irradiance correction
  double pv_theta3_per_c = -3.25e-3;      // temperature correction
  double carbon_price_per_kg = 0.1;   // 100 GBP/tonne
  double battery_capex_per_kwh = 460.0;
  double pv_capex_per_m2 = 325.0;
  double battery_life_years = 15.0;
  double pv_life_years = 30.0;
  double interest_rate = 0.02;

  void validate() const;
};

struct SystemState {
  double T = 0.0;    // indoor temperature, degC
  double soc = 0.0;  // battery state of charge, kWh
};

struct ControlInput {
  double u_eH = 0.0;   // heating electricity, kW
  double u_CeH = 0.0;  // cooling electricity, kW
  double u_dch = 0.0;  // battery discharge, kW
  double u_ch = 0.0;   // battery charge, kW
  double u_b = 0.0;    // bought grid power, kW
  double u_s = 0.0;    // sold grid power, kW
};

// Reduced thermal dynamics: dT/dt = (gains - loss*(T - T_e)) / cap.
struct ThermalCoefficients {
  double loss_kw_per_k = 0.0;  // UA + ventilation
  double cap_kwh_per_k = 0.0;  // thermal mass
};

// COP(T_e) = m_cop * (T_e - 7) + 3.
double cop_heat(double T_e, const AssetParams& assets);

// PVUSA-style output: theta1 * (1 + theta2*I + theta3*T_e) * (I/1000) * S_pv,
// clamped below at zero.
double pv_power(double irradiance_w_m2, double T_e, double pv_area_m2, const AssetParams& assets);

ThermalCoefficients derive_coefficients(const BuildingParams& building);

// Explicit Euler step of the two-state dynamics over dt hours.
SystemState euler_step(const SystemState& x, const ControlInput& u, const ExogenousSample& w,
                       double dt_hours, const ThermalCoefficients& coeffs,
                       const AssetParams& assets);

}  // namespace codesign
