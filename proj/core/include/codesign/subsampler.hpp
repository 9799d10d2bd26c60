#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "codesign/clusterer.hpp"
#include "codesign/economics.hpp"
#include "codesign/empc.hpp"
#include "codesign/search.hpp"
#include "codesign/timeseries.hpp"

namespace codesign {

// One scenario piece of the decomposed problem: a simulation window (with
// horizon padding), its annualisation weight and assigned initial state.
struct ScenarioWindow {
  ExogenousSeries window;
  double sim_hours = 0.0;
  double weight = 0.0;  // R_h = 8760 / sim_hours
  SystemState x_hat;
  std::string label;
};

// Materialises split_subsamples output into simulation-ready windows, all
// starting from the given initial state.
std::vector<ScenarioWindow> windows_from_series(const ExogenousSeries& series, double sim_hours,
                                                std::size_t horizon_steps, double stride_hours,
                                                const SystemState& x_hat);

// Turns a free-standing series (e.g. a held-out dataset) into one window:
// the simulation span is the largest T_s multiple leaving `horizon_hours`
// of padding.
ScenarioWindow window_from_heldout(const ExogenousSeries& series, const ControllerParams& pc,
                                   const SystemState& x_hat);

struct ImportancePoint {
  std::size_t subsample_id = 0;
  SizingParams p_star;
  double v_star = 0.0;  // GBP/yr: R_h-weighted operation + investment
  SystemState x_hat;
};

// Maps a 2-D sizing lattice point to integer technology units.
SizingParams sizing_from_lattice(const Lattice& lattice, const LatticePoint& point);

// Per-subsample importance problem: minimise annualised operation +
// investment over the sizing lattice via pattern search.
ImportancePoint importance_solve(const ScenarioWindow& window, std::size_t subsample_id,
                                 const ControllerParams& pc_star, const Lattice& sizing_lattice,
                                 const PlantModel& model, const EmpcOptions& opts,
                                 const EconomicsSpec& econ, std::size_t budget);

struct ScalingSpec {
  bool enabled = true;
  bool degenerate = false;  // all costs equal: cost coordinate dropped
  double cost_min = 0.0;
  double cost_max = 0.0;
  double target_lo = -60.0;
  double target_hi = 60.0;
};

// Coordinates used for clustering: [cost (scaled if enabled), battery kWh,
// PV m2]. The affine cost map and its inputs are returned for inversion.
std::pair<std::vector<std::vector<double>>, ScalingSpec> scale_points(
    const std::vector<ImportancePoint>& points, bool enabled, double target_lo = -60.0,
    double target_hi = 60.0);

struct ClusterModel {
  std::size_t n_c = 0;
  std::vector<std::size_t> representative_ids;  // indices into the point set, ascending
  std::vector<double> weights;                  // nu_i, aligned with representatives
  std::vector<std::vector<double>> medoid_coords;
  std::vector<double> within_cluster_max;
  std::vector<int> labels;  // per point: representative slot
  ScalingSpec scaling;
  std::uint64_t seed = 0;
};

// Representative selection loop: grow k from 2 until the worst point-to-medoid distance
// drops below d_max or k reaches k_max.
ClusterModel select_representatives(const std::vector<ImportancePoint>& points,
                                    std::size_t k_max, double d_max, std::uint64_t seed,
                                    ClusterMetric metric = ClusterMetric::kEuclidean,
                                    bool scaling_enabled = true);

// Direct cluster-count override (n_c given instead of d_max).
ClusterModel cluster_fixed(const std::vector<ImportancePoint>& points, std::size_t n_c,
                           std::uint64_t seed, ClusterMetric metric = ClusterMetric::kEuclidean,
                           bool scaling_enabled = true);

// Every point as its own representative with unit weight (the n_c = m limit).
ClusterModel full_cluster_model(std::size_t m);

// Points + assignments CSV for cluster plots; v_star serialised with 17
// significant digits so reloading reproduces the in-memory values.
void write_points_csv(const std::vector<ImportancePoint>& points, const ClusterModel& model,
                      std::ostream& out);

std::vector<ImportancePoint> load_points_csv(std::istream& in);

}  // namespace codesign
