#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "codesign/constants.hpp"
#include "codesign/linprog.hpp"
#include "codesign/thermal.hpp"
#include "codesign/timeseries.hpp"

namespace codesign {

// Integer controller lattice: T_s = n_s T_d, delta_T = n_x T_s, t_f = n_f
// hours, with the discretisation step derived as T_d = delta_T / (n_x n_s).
struct ControllerParams {
  int n_s = 1;
  int n_x = 1;
  int n_f = 24;
  double delta_T_min = 15.0;   // price block length
  double T_d_floor_min = 5.0;  // lower bound on the discretisation step

  double T_d_min() const { return delta_T_min / (n_x * n_s); }
  double T_s_min() const { return delta_T_min / n_x; }
  double T_d_hours() const { return T_d_min() / 60.0; }
  double T_s_hours() const { return T_s_min() / 60.0; }
  double horizon_hours() const { return n_f; }
  // Prediction intervals per solve.
  int horizon_intervals() const;
  // Inputs applied per MPC sample (zero-order hold over T_d steps).
  int inputs_per_sample() const { return n_s; }

  void validate() const;
  std::string label() const;  // "ns,nx,nf"
};

struct SizingParams {
  int battery_units = 0;  // 1 kWh granularity
  int pv_units = 0;       // 1.68 m2 granularity

  double battery_kwh() const { return battery_units * kBatteryUnitKwh; }
  double pv_m2() const { return pv_units * kPvUnitM2; }
  void validate(const BuildingParams& building, const AssetParams& assets) const;
  std::string label() const;  // "battery_kwh,pv_m2"
};

// Building + asset parameters with derived thermal coefficients, bundled so
// the pipeline passes one immutable model around.
struct PlantModel {
  BuildingParams building;
  AssetParams assets;
  ThermalCoefficients coeffs;

  static PlantModel make(const BuildingParams& building, const AssetParams& assets);
};

struct EmpcOptions {
  double comfort_lo_c = 19.0;
  double comfort_hi_c = 25.0;
  // When the hard OCP is infeasible, retry with symmetric comfort slack at
  // this penalty (GBP per degC h). Disable to make infeasibility fatal.
  bool soft_comfort_fallback = true;
  double slack_penalty_per_degch = 1e3;
  std::optional<double> soc_terminal_floor_kwh;  // off by default
  double lp_tol = kLpFeasTol;
};

// Electricity + carbon stage cost in GBP/h for a held input against sample w.
double stage_cost_rate(const ControlInput& u, const ExogenousSample& w, const AssetParams& assets);

// Builds the finite-horizon OCP as an LP over `n` intervals of the grid
// series (resolution = T_d) starting at sample `start`.
// Decision layout: inputs k<n at 6k (u_eH,u_CeH,u_dch,u_ch,u_b,u_s), states
// at 6n+2k (T_k, SoC_k), then comfort slacks when `soft_comfort` is set.
LpProblem transcribe(const SystemState& x0, const ExogenousSeries& grid, std::size_t start,
                     const SizingParams& sizing, const ControllerParams& pc,
                     const PlantModel& model, const EmpcOptions& opts, bool soft_comfort);

struct OcpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<ControlInput> u;   // N entries, zero-order hold per interval
  std::vector<SystemState> x;    // N+1 grid states
  double open_loop_cost = 0.0;   // objective including any slack penalty
  bool used_slack = false;
  double max_slack_degc = 0.0;
};

OcpSolution plan(const SystemState& x0, const ExogenousSeries& grid, std::size_t start,
                 const SizingParams& sizing, const ControllerParams& pc, const PlantModel& model,
                 const EmpcOptions& opts, LpWarmStart* warm = nullptr);

struct ClosedLoopResult {
  std::vector<ControlInput> applied;  // one per T_d step over the span
  std::vector<SystemState> states;    // span/T_d + 1 grid states
  std::vector<double> v_cl;           // cost per sampling interval [t_i, t_i+T_s]
  double comfort_violation_max_c = 0.0;
  double soc_violation_max_kwh = 0.0;
  int recovery_solves = 0;       // samples that needed the soft fallback
  double slack_total_degch = 0.0;
  double wall_time_s = 0.0;
  double dt_hours = 0.0;

  double total_cost() const;
};

// Receding-horizon simulation over `span_hours`, sampling every T_s, applying
// the first n_s inputs of each plan and integrating the plant with explicit
// Euler at the controller resolution. Forecasts are the true series.
ClosedLoopResult closed_loop(const SystemState& x0, const ExogenousSeries& series,
                             const SizingParams& sizing, const ControllerParams& pc,
                             const PlantModel& model, const EmpcOptions& opts, double span_hours);

// Trajectory CSV: one row per grid point with state, inputs, price and the
// owning sampling interval.
void write_closed_loop_csv(const ClosedLoopResult& result, const ExogenousSeries& grid,
                           std::ostream& out);

}  // namespace codesign
