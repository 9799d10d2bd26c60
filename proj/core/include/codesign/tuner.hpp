#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "codesign/empc.hpp"
#include "codesign/timeseries.hpp"

namespace codesign {

struct TuningPoint {
  ControllerParams pc;
  std::vector<double> j2_per_p;  // aligned with the sizing-sample order
  double j2 = 0.0;               // worst case over sizing samples
  double j3 = 0.0;
  std::size_t lattice_index = 0;
};

// Non-dominated subset on (j2, j3), sorted by ascending j3.
struct ParetoFront {
  std::vector<TuningPoint> points;
};

// Preference cost on the controller lattice: prefers short horizons and
// large sampling/discretisation steps.
double j3(const ControllerParams& pc);

// All integer triples satisfying the controller bounds, ordered by
// (n_s, n_x, n_f) ascending.
std::vector<ControllerParams> enumerate_pc(double delta_T_min, double T_d_floor_min, int n_f_lo,
                                           int n_f_hi);

// Re-bins per-interval costs from one uniform grid to another by exact
// time-overlap weighting; both grids must cover the same span.
std::vector<double> aggregate_to_grid(const std::vector<double>& v, double src_hours,
                                      double dst_hours);

struct ReferenceRun {
  SystemState x_worst;
  std::vector<double> v_ref;  // per reference sampling interval
  double t_s_hours = 0.0;
};

// Runs the reference controller from every candidate initial state and keeps
// the costliest one (ties: first in the list).
ReferenceRun reference_run(const ExogenousSeries& window, double sim_hours,
                           const SizingParams& p, const ControllerParams& pc_ref,
                           const std::vector<SystemState>& x0_set, const PlantModel& model,
                           const EmpcOptions& opts);

// l1 gap between the candidate's closed-loop cost vector and the reference's,
// re-binned onto the candidate sampling grid.
double j2(const ExogenousSeries& window, double sim_hours, const SizingParams& p,
          const ControllerParams& pc, const ReferenceRun& ref, const PlantModel& model,
          const EmpcOptions& opts);

ParetoFront pareto_front(const std::vector<TuningPoint>& points);

struct TuneSetup {
  double sim_hours = 0.0;  // evaluation span inside the window
  std::vector<SizingParams> p_samples;
  std::vector<std::vector<SystemState>> x0_sets;  // one set per sizing sample
  ControllerParams pc_ref;
  double epsilon = 1.0;  // GBP acceptance threshold on worst-case j2
  double delta_T_min = 15.0;
  double T_d_floor_min = 5.0;
  int n_f_lo = 1;
  int n_f_hi = 24;
  int threads = 1;
};

struct TuneResult {
  ControllerParams pc_star;
  bool epsilon_satisfied = true;
  std::vector<TuningPoint> lattice;     // every evaluated triple
  std::vector<ParetoFront> fronts;      // one per sizing sample
  std::vector<std::string> excluded;    // pc labels whose evaluations all failed
};

// MPC tuning: evaluates the whole controller lattice against the reference,
// aggregates j2 across sizing samples with the max risk measure, and picks
// the feasible point of least j3 with worst-case j2 <= epsilon (falling back
// to the least worst-case j2 with a warning flag).
TuneResult tune(const ExogenousSeries& window, const TuneSetup& setup, const PlantModel& model,
                const EmpcOptions& opts);

// Fronts CSV (one row per lattice point): n_s,n_x,n_f,j2_p...,max_j2,j3,on_front...
void write_tuning_csv(const TuneResult& result, std::ostream& out);

}  // namespace codesign
