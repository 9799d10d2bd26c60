#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "codesign/economics.hpp"
#include "codesign/empc.hpp"
#include "codesign/search.hpp"
#include "codesign/subsampler.hpp"
#include "codesign/tuner.hpp"

namespace codesign {

struct DesignReport {
  SizingParams p_star;
  double estimated_cost = 0.0;  // GBP/yr, optimiser's (clustered) objective
  double effective_cost = 0.0;  // GBP/yr, full re-simulation
  bool effective_on_training = true;
  std::vector<double> per_scenario_costs;  // GBP/yr per scenario (solve_full)
  double wall_time_s = 0.0;
  std::size_t evaluations = 0;
  std::string provenance;
};

struct SolveOptions {
  std::size_t search_budget = 400;
  int threads = 1;
  std::optional<LatticePoint> start;  // defaults to the lattice origin
};

// Decomposed sizing: risk over the nu-weighted collection of
// annualised representative costs plus investment, minimised over the sizing
// lattice by pattern search. With expectation this reads
//   (1/m) sum_i nu_i R_i 1'V_i(p) + V_I(p),
// which for year-tiling subsamples coincides with the plain nu-weighted sum.
DesignReport solve_pcd(const std::vector<ScenarioWindow>& windows, const ClusterModel& clusters,
                       const ControllerParams& pc, RiskMeasure measure, const Lattice& lattice,
                       const PlantModel& model, const EmpcOptions& opts,
                       const EconomicsSpec& econ, const SolveOptions& so,
                       const ExogenousSeries* full_series = nullptr);

// Annualised cost of one fixed design across scenarios (the "mean cost"
// cross-evaluation): per-scenario (8760/span) * operation + investment.
std::vector<double> evaluate_design(const SizingParams& p,
                                    const std::vector<ExogenousSeries>& scenarios,
                                    const ControllerParams& pc, double span_hours,
                                    const PlantModel& model, const EmpcOptions& opts,
                                    const EconomicsSpec& econ, int threads);

// Monolithic sizing baseline at a fixed controller: risk across scenarios of
// the annualised closed-loop cost plus investment, minimised over the
// lattice. One scenario = deterministic design.
DesignReport solve_full(const std::vector<ExogenousSeries>& scenarios,
                        const ControllerParams& pc, RiskMeasure measure, const Lattice& lattice,
                        double span_hours, const PlantModel& model, const EmpcOptions& opts,
                        const EconomicsSpec& econ, const SolveOptions& so);

struct ValidationRow {
  std::string label;
  double cost_at_p_star = 0.0;  // GBP/yr on this window
  double local_best = 0.0;      // the window's own importance optimum
  double regret = 0.0;
  bool augment = false;
};

struct ValidationReport {
  double threshold = 0.0;
  std::vector<ValidationRow> rows;
  bool any_augmented() const;
};

// Compares the chosen design against each held-out window's own optimum;
// windows whose regret exceeds the threshold are flagged for augmentation.
ValidationReport validate(const SizingParams& p_star, const std::vector<ScenarioWindow>& heldout,
                          const ControllerParams& pc, double threshold, const Lattice& lattice,
                          const PlantModel& model, const EmpcOptions& opts,
                          const EconomicsSpec& econ, const SolveOptions& so);

struct PipelineConfig {
  // Subsample split of the training series.
  double sub_sim_hours = 168.0;
  double sub_stride_hours = 168.0;

  // Controller lattice and tuning.
  double delta_T_min = 15.0;
  double T_d_floor_min = 5.0;
  int n_f_lo = 1;
  int n_f_hi = 24;
  double tune_epsilon = 1.0;
  double tune_window_hours = 168.0;  // taken from the head of the series
  bool skip_tuning = false;
  ControllerParams pc_fixed;           // used when tuning is skipped
  ControllerParams pc_ref{1, 3, 72};   // T_d = T_s = 5 min, three-day horizon

  // Sizing lattice and search.
  Lattice sizing_lattice;
  std::size_t search_budget = 400;

  // Clustering.
  std::size_t k_max = 100;
  double d_max = 10.0;
  std::optional<std::size_t> n_c_override;
  bool scaling_enabled = true;

  RiskMeasure measure{RiskMeasure::kExpectation};

  // Validation loop.
  double validation_threshold = 0.0;  // <= 0 disables validation
  int max_validation_rounds = 3;

  int threads = 1;
  std::uint64_t master_seed = 0;

  static Lattice default_sizing_lattice();
};

struct CodesignOutcome {
  ControllerParams pc_initial;  // tuning result (or the fixed choice)
  ControllerParams pc_star;     // after the final re-tune at p*
  SizingParams p_star;
  DesignReport report;
  std::vector<ImportancePoint> points;
  ClusterModel clusters;
  std::optional<TuneResult> tune_initial;
  std::optional<TuneResult> tune_final;
  ValidationReport validation;
  int validation_rounds = 0;
  std::vector<std::pair<std::string, double>> stage_seconds;
};

// A pipeline stage failed: carries the stage tag and everything the run had
// produced up to that point, so callers can persist partial artifacts.
class CodesignStageError : public std::runtime_error {
 public:
  CodesignStageError(const std::string& stage, const std::string& what, CodesignOutcome partial)
      : std::runtime_error("stage '" + stage + "' failed: " + what),
        stage(stage),
        partial(std::move(partial)) {}
  std::string stage;
  CodesignOutcome partial;
};

// Full decomposed co-design: tune, score subsamples, cluster, size, validate
// (augmenting on failure), then re-tune at the chosen design. Throws
// CodesignStageError on any stage failure.
CodesignOutcome run_codesign(const ExogenousSeries& training,
                             const std::vector<ExogenousSeries>& heldout,
                             const PipelineConfig& cfg, const PlantModel& model,
                             const EmpcOptions& opts);

void write_design_report_csv(const std::vector<std::pair<std::string, DesignReport>>& rows,
                             std::ostream& out);
void write_validation_csv(const ValidationReport& report, std::ostream& out);

}  // namespace codesign
