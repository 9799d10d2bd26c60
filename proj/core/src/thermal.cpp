#include "codesign/thermal.hpp"

#include <algorithm>
#include <stdexcept>

namespace codesign {

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("thermal: ") + what);
}
}  // namespace

void BuildingParams::validate() const {
  require(u_value_w_m2k > 0, "U-value must be positive");
  require(wall_area_m2 > 0, "wall area must be positive");
  require(air_density_kg_m3 > 0, "air density must be positive");
  require(volume_m3 > 0, "volume must be positive");
  require(air_heat_capacity_kj_kgk > 0, "air heat capacity must be positive");
  require(air_changes_per_h > 0, "air change rate must be positive");
  require(thermal_mass_kj_k > 0, "thermal mass must be positive");
  require(floor_area_m2 > 0, "floor area must be positive");
  require(heat_pump_elec_max_kw > 0 && cool_pump_elec_max_kw > 0 && heat_pump_capacity_kw > 0,
          "plant bounds must be positive");
}

void AssetParams::validate() const {
  require(eta_charge > 0 && eta_charge <= 1, "charge efficiency in (0,1]");
  require(eta_discharge > 0 && eta_discharge <= 1, "discharge efficiency in (0,1]");
  require(discharge_hours > 0, "discharge hours must be positive");
  require(battery_life_years >= 1 && pv_life_years >= 1, "lifespans must be at least one year");
  require(soc_max_kwh >= 0, "battery bound must be non-negative");
  require(interest_rate >= 0, "interest rate must be non-negative");
}

double cop_heat(double T_e, const AssetParams& assets) {
  return assets.cop_slope_per_c * (T_e - 7.0) + 3.0;
}

double pv_power(double irradiance_w_m2, double T_e, double pv_area_m2, const AssetParams& assets) {
  const double correction =
      1.0 + assets.pv_theta2_per_w_m2 * irradiance_w_m2 + assets.pv_theta3_per_c * T_e;
  const double kw =
      assets.pv_theta1 * correction * (irradiance_w_m2 / 1000.0) * pv_area_m2;
  return std::max(0.0, kw);
}

ThermalCoefficients derive_coefficients(const BuildingParams& building) {
  building.validate();
  ThermalCoefficients c;
  // U*A in W/K -> kW/K; ventilation rho*V*Cp*n_ac in kJ/(K h) -> kW/K.
  c.loss_kw_per_k = building.u_value_w_m2k * building.wall_area_m2 / 1000.0 +
                    building.air_density_kg_m3 * building.volume_m3 *
                        building.air_heat_capacity_kj_kgk * building.air_changes_per_h / 3600.0;
  c.cap_kwh_per_k = building.thermal_mass_kj_k / 3600.0;
  return c;
}

SystemState euler_step(const SystemState& x, const ControlInput& u, const ExogenousSample& w,
                       double dt_hours, const ThermalCoefficients& coeffs,
                       const AssetParams& assets) {
  if (!(dt_hours > 0)) throw std::invalid_argument("thermal: euler_step requires dt > 0");
  SystemState next;
  const double heat_kw = cop_heat(w.T_e, assets) * u.u_eH - assets.cop_cool * u.u_CeH -
                         coeffs.loss_kw_per_k * (x.T - w.T_e);
  next.T = x.T + dt_hours * heat_kw / coeffs.cap_kwh_per_k;
  next.soc = x.soc + dt_hours * (assets.eta_charge * u.u_ch - u.u_dch / assets.eta_discharge);
  return next;
}

}  // namespace codesign
