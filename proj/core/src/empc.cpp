#include "codesign/empc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace codesign {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument("empc: " + what); }

bool near_integer(double x) { return std::fabs(x - std::llround(x)) < 1e-9; }

}  // namespace

int ControllerParams::horizon_intervals() const {
  const double n = horizon_hours() * 60.0 / T_d_min();
  return static_cast<int>(std::llround(n));
}

void ControllerParams::validate() const {
  if (n_s < 1 || n_x < 1 || n_f < 1) fail("controller integers must be at least 1");
  if (!(delta_T_min > 0.0) || !(T_d_floor_min > 0.0)) fail("durations must be positive");
  const double cap = delta_T_min / T_d_floor_min;
  if (n_s * n_x > cap + 1e-9) fail("n_s*n_x exceeds delta_T / T_d floor");
  if (T_d_min() < T_d_floor_min - 1e-9) fail("derived T_d below its floor");
  if (!near_integer(horizon_hours() * 60.0 / T_d_min())) fail("horizon not a multiple of T_d");
  if (!near_integer(horizon_hours() * 60.0 / T_s_min())) fail("horizon not a multiple of T_s");
}

std::string ControllerParams::label() const {
  return std::to_string(n_s) + "," + std::to_string(n_x) + "," + std::to_string(n_f);
}

void SizingParams::validate(const BuildingParams& building, const AssetParams& assets) const {
  if (battery_units < 0 || pv_units < 0) fail("sizing units must be non-negative");
  if (battery_kwh() > assets.soc_max_kwh + 1e-9) fail("battery above the admissible maximum");
  if (pv_m2() > building.floor_area_m2 + 1e-9) fail("PV area above the floor area");
}

std::string SizingParams::label() const {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%gkWh,%gm2", battery_kwh(), pv_m2());
  return buf;
}

PlantModel PlantModel::make(const BuildingParams& building, const AssetParams& assets) {
  building.validate();
  assets.validate();
  PlantModel model;
  model.building = building;
  model.assets = assets;
  model.coeffs = derive_coefficients(building);
  return model;
}

double stage_cost_rate(const ControlInput& u, const ExogenousSample& w,
                       const AssetParams& assets) {
  return w.c_el * u.u_b - kSellPriceRatio * w.c_el * u.u_s +
         assets.carbon_price_per_kg * w.c_em * u.u_b;
}

LpProblem transcribe(const SystemState& x0, const ExogenousSeries& grid, std::size_t start,
                     const SizingParams& sizing, const ControllerParams& pc,
                     const PlantModel& model, const EmpcOptions& opts, bool soft_comfort) {
  pc.validate();
  sizing.validate(model.building, model.assets);
  if (std::fabs(grid.resolution_min - pc.T_d_min()) > 1e-6)
    fail("grid resolution does not match the controller discretisation step");
  const auto n = static_cast<std::size_t>(pc.horizon_intervals());
  if (start + n >= grid.size()) fail("forecast too short for the prediction horizon");

  const auto& assets = model.assets;
  const double dt = pc.T_d_hours();
  const double loss = model.coeffs.loss_kw_per_k;
  const double cap = model.coeffs.cap_kwh_per_k;
  const double s_b = sizing.battery_kwh();
  const double s_pv = sizing.pv_m2();
  const double rate_max = s_b / assets.discharge_hours;

  LpProblem lp;
  // Inputs: 6 per interval.
  for (std::size_t k = 0; k < n; ++k) {
    const auto& w = grid.at(start + k);
    const double cop = cop_heat(w.T_e, assets);
    double eh_cap = model.building.heat_pump_elec_max_kw;
    if (cop > 0.0) eh_cap = std::min(eh_cap, model.building.heat_pump_capacity_kw / cop);
    const double buy_cost = (w.c_el + assets.carbon_price_per_kg * w.c_em) * dt;
    const double sell_gain = -kSellPriceRatio * w.c_el * dt;
    lp.add_variable(0.0, eh_cap, 0.0);
    lp.add_variable(0.0, model.building.cool_pump_elec_max_kw, 0.0);
    lp.add_variable(0.0, rate_max, 0.0);
    lp.add_variable(0.0, rate_max, 0.0);
    lp.add_variable(0.0, assets.buy_max_kw, buy_cost);
    lp.add_variable(0.0, assets.sell_max_kw, sell_gain);
  }
  // States: T_k, SoC_k for k = 0..n.
  const int state_base = static_cast<int>(6 * n);
  for (std::size_t k = 0; k <= n; ++k) {
    double t_lo = soft_comfort ? -60.0 : opts.comfort_lo_c;
    double t_hi = soft_comfort ? 100.0 : opts.comfort_hi_c;
    double soc_lo = 0.0;
    double soc_hi = s_b;
    if (k == 0) {
      t_lo = t_hi = x0.T;
      soc_lo = soc_hi = std::clamp(x0.soc, 0.0, s_b);
    } else if (k == n && opts.soc_terminal_floor_kwh) {
      soc_lo = std::min(*opts.soc_terminal_floor_kwh, s_b);
    }
    lp.add_variable(t_lo, t_hi, 0.0);
    lp.add_variable(soc_lo, soc_hi, 0.0);
  }
  const auto t_var = [&](std::size_t k) { return state_base + static_cast<int>(2 * k); };
  const auto soc_var = [&](std::size_t k) { return state_base + static_cast<int>(2 * k) + 1; };

  // Dynamics (explicit Euler) and the nodal power balance.
  for (std::size_t k = 0; k < n; ++k) {
    const auto& w = grid.at(start + k);
    const double cop = cop_heat(w.T_e, assets);
    const int u0 = static_cast<int>(6 * k);
    // T_{k+1} - (1 - dt*loss/cap) T_k - (dt cop/cap) u_eH + (dt cop_cool/cap) u_CeH
    //   = dt*loss/cap * T_e
    const double rhs_t = dt * loss / cap * w.T_e;
    lp.add_row({t_var(k + 1), t_var(k), u0 + 0, u0 + 1},
               {1.0, -(1.0 - dt * loss / cap), -dt * cop / cap, dt * assets.cop_cool / cap},
               rhs_t, rhs_t);
    // SoC_{k+1} - SoC_k - dt (eta_ch u_ch - u_dch / eta_ds) = 0
    lp.add_row({soc_var(k + 1), soc_var(k), u0 + 3, u0 + 2},
               {1.0, -1.0, -dt * assets.eta_charge, dt / assets.eta_discharge}, 0.0, 0.0);
    // u_b - u_s + u_dch - u_ch - u_eH - u_CeH = -P_pv
    const double pv = pv_power(w.I, w.T_e, s_pv, assets);
    lp.add_row({u0 + 4, u0 + 5, u0 + 2, u0 + 3, u0 + 0, u0 + 1},
               {1.0, -1.0, 1.0, -1.0, -1.0, -1.0}, -pv, -pv);
  }

  if (soft_comfort) {
    // One slack per future grid point: T_k + s_k >= lo, T_k - s_k <= hi.
    for (std::size_t k = 1; k <= n; ++k) {
      const int s = lp.add_variable(0.0, kLpInf, opts.slack_penalty_per_degch * dt);
      lp.add_row({t_var(k), s}, {1.0, 1.0}, opts.comfort_lo_c, kLpInf);
      lp.add_row({t_var(k), s}, {1.0, -1.0}, -kLpInf, opts.comfort_hi_c);
    }
  }
  return lp;
}

namespace {

// Dynamics-consistent starting basis for a transcribed OCP: future states and
// the grid-import column of every interval are basic (a permuted-triangular
// set for the dynamics and balance equalities), everything else sits at its
// lower bound; comfort-row slacks of the soft variant are basic too. Cuts the
// phase-1 work dramatically compared with the all-slack cold start.
LpWarmStart crash_basis(const LpProblem& lp, std::size_t n, bool soft_comfort) {
  LpWarmStart crash;
  crash.state.assign(lp.num_vars() + lp.num_rows(), lp_basis::kAtLower);
  for (std::size_t k = 0; k < n; ++k) crash.state[6 * k + 4] = lp_basis::kBasic;  // u_b
  const std::size_t state_base = 6 * n;
  for (std::size_t k = 1; k <= n; ++k) {
    crash.state[state_base + 2 * k] = lp_basis::kBasic;      // T_k
    crash.state[state_base + 2 * k + 1] = lp_basis::kBasic;  // SoC_k
  }
  if (soft_comfort) {
    for (std::size_t i = 3 * n; i < lp.num_rows(); ++i)
      crash.state[lp.num_vars() + i] = lp_basis::kBasic;
  }
  return crash;
}

}  // namespace

OcpSolution plan(const SystemState& x0, const ExogenousSeries& grid, std::size_t start,
                 const SizingParams& sizing, const ControllerParams& pc, const PlantModel& model,
                 const EmpcOptions& opts, LpWarmStart* warm) {
  const auto n = static_cast<std::size_t>(pc.horizon_intervals());
  auto lp = transcribe(x0, grid, start, sizing, pc, model, opts, /*soft_comfort=*/false);
  LpWarmStart local;
  if (warm == nullptr) warm = &local;
  if (warm->empty()) *warm = crash_basis(lp, n, false);
  auto sol = solve_lp(lp, opts.lp_tol, warm);

  OcpSolution out;
  out.status = sol.status;
  if (sol.status == LpStatus::kInfeasible && opts.soft_comfort_fallback) {
    lp = transcribe(x0, grid, start, sizing, pc, model, opts, /*soft_comfort=*/true);
    // Slack problems have a different column count; warm data is unusable.
    LpWarmStart fresh = crash_basis(lp, n, true);
    sol = solve_lp(lp, opts.lp_tol, &fresh);
    out.status = sol.status;
    if (sol.status == LpStatus::kOptimal) {
      out.used_slack = true;
      const std::size_t slack_base = 6 * n + 2 * (n + 1);
      for (std::size_t k = slack_base; k < sol.x.size(); ++k)
        out.max_slack_degc = std::max(out.max_slack_degc, sol.x[k]);
    }
  }
  if (sol.status == LpStatus::kUnbounded)
    throw std::logic_error("empc: OCP unbounded; model bounds are inconsistent");
  if (sol.status != LpStatus::kOptimal) return out;

  out.open_loop_cost = sol.objective;
  out.u.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t u0 = 6 * k;
    out.u[k] = ControlInput{sol.x[u0], sol.x[u0 + 1], sol.x[u0 + 2],
                            sol.x[u0 + 3], sol.x[u0 + 4], sol.x[u0 + 5]};
  }
  out.x.resize(n + 1);
  const std::size_t state_base = 6 * n;
  for (std::size_t k = 0; k <= n; ++k) {
    out.x[k] = SystemState{sol.x[state_base + 2 * k], sol.x[state_base + 2 * k + 1]};
  }
  return out;
}

double ClosedLoopResult::total_cost() const {
  double total = 0.0;
  for (double v : v_cl) total += v;
  return total;
}

ClosedLoopResult closed_loop(const SystemState& x0, const ExogenousSeries& series,
                             const SizingParams& sizing, const ControllerParams& pc,
                             const PlantModel& model, const EmpcOptions& opts,
                             double span_hours) {
  pc.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const auto grid = resample(series, pc.T_d_min());
  const double t_s = pc.T_s_hours();
  const double samples_f = span_hours / t_s;
  if (!near_integer(samples_f) || samples_f < 1.0)
    fail("span is not a positive multiple of the sampling time");
  const auto m = static_cast<std::size_t>(std::llround(samples_f));
  const auto n_d = static_cast<std::size_t>(pc.inputs_per_sample());
  const auto horizon = static_cast<std::size_t>(pc.horizon_intervals());
  if ((m - 1) * n_d + horizon + 1 > grid.size())
    fail("series does not cover span + prediction horizon");

  const double dt = pc.T_d_hours();
  const double s_b = sizing.battery_kwh();

  ClosedLoopResult result;
  result.dt_hours = dt;
  result.applied.reserve(m * n_d);
  result.states.reserve(m * n_d + 1);
  result.v_cl.reserve(m);

  SystemState x = x0;
  result.states.push_back(x);
  LpWarmStart warm;
  for (std::size_t i = 0; i < m; ++i) {
    OcpSolution ocp;
    try {
      ocp = plan(x, grid, i * n_d, sizing, pc, model, opts, &warm);
    } catch (const SolverStallError& e) {
      throw std::runtime_error("empc: solver stall at sample " + std::to_string(i) + ": " +
                               e.what());
    }
    if (ocp.status != LpStatus::kOptimal)
      throw std::runtime_error("empc: infeasible OCP at sample " + std::to_string(i) +
                               " (soft recovery " +
                               (opts.soft_comfort_fallback ? "failed" : "disabled") + ")");
    if (ocp.used_slack) {
      ++result.recovery_solves;
      result.slack_total_degch += ocp.max_slack_degc * t_s;
    }

    double v = 0.0;
    for (std::size_t j = 0; j < n_d; ++j) {
      const auto& u = ocp.u[j];
      const auto& w = grid.at(i * n_d + j);
      v += stage_cost_rate(u, w, model.assets) * dt;
      x = euler_step(x, u, w, dt, model.coeffs, model.assets);
      result.applied.push_back(u);
      result.states.push_back(x);
      result.comfort_violation_max_c =
          std::max({result.comfort_violation_max_c, opts.comfort_lo_c - x.T,
                    x.T - opts.comfort_hi_c});
      result.soc_violation_max_kwh =
          std::max({result.soc_violation_max_kwh, -x.soc, x.soc - s_b});
    }
    result.v_cl.push_back(v);
  }
  result.comfort_violation_max_c = std::max(0.0, result.comfort_violation_max_c);
  result.soc_violation_max_kwh = std::max(0.0, result.soc_violation_max_kwh);
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

void write_closed_loop_csv(const ClosedLoopResult& result, const ExogenousSeries& grid,
                           std::ostream& out) {
  out << "t,T,SoC,u_eH,u_CeH,u_dch,u_ch,u_b,u_s,c_el,interval\n";
  const std::size_t steps = result.applied.size();
  const std::size_t per_sample = steps == 0 || result.v_cl.empty() ? 1 : steps / result.v_cl.size();
  for (std::size_t k = 0; k < steps; ++k) {
    const auto& u = result.applied[k];
    const auto& x = result.states[k];
    out << grid.at(k).t << ',' << x.T << ',' << x.soc << ',' << u.u_eH << ',' << u.u_CeH << ','
        << u.u_dch << ',' << u.u_ch << ',' << u.u_b << ',' << u.u_s << ',' << grid.at(k).c_el
        << ',' << k / per_sample << '\n';
  }
}

}  // namespace codesign
