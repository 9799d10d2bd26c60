#include "codesign/subsampler.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "codesign/constants.hpp"

namespace codesign {

std::vector<ScenarioWindow> windows_from_series(const ExogenousSeries& series, double sim_hours,
                                                std::size_t horizon_steps, double stride_hours,
                                                const SystemState& x_hat) {
  const auto subs = split_subsamples(series, sim_hours, horizon_steps, stride_hours);
  std::vector<ScenarioWindow> windows;
  windows.reserve(subs.size());
  for (const auto& sub : subs) {
    ScenarioWindow w;
    w.window = slice(series, sub);
    w.sim_hours = sim_hours;
    w.weight = sub.weight;
    w.x_hat = x_hat;
    w.label = w.window.origin;
    windows.push_back(std::move(w));
  }
  return windows;
}

ScenarioWindow window_from_heldout(const ExogenousSeries& series, const ControllerParams& pc,
                                   const SystemState& x_hat) {
  series.validate();
  const double t_s = pc.T_s_hours();
  const double usable = series.span_hours() - pc.horizon_hours();
  const double sim = std::floor(usable / t_s + 1e-9) * t_s;
  if (sim < t_s)
    throw std::invalid_argument("heldout window shorter than one sampling interval plus horizon");
  ScenarioWindow w;
  w.window = series;
  w.sim_hours = sim;
  w.weight = kHoursPerYear / sim;
  w.x_hat = x_hat;
  w.label = series.origin;
  return w;
}

SizingParams sizing_from_lattice(const Lattice& lattice, const LatticePoint& point) {
  if (lattice.dims.size() != 2 || point.size() != 2)
    throw std::invalid_argument("sizing lattice must be 2-D (battery, PV)");
  const auto to_units = [](double value, double unit, const char* what) {
    const double units = value / unit;
    if (units < -1e-9 || std::fabs(units - std::llround(units)) > 1e-6)
      throw std::invalid_argument(std::string("sizing lattice ") + what +
                                  " is not a whole number of technology units");
    return static_cast<int>(std::llround(units));
  };
  SizingParams p;
  p.battery_units = to_units(lattice.dims[0].value(point[0]), kBatteryUnitKwh, "battery value");
  p.pv_units = to_units(lattice.dims[1].value(point[1]), kPvUnitM2, "PV value");
  return p;
}

ImportancePoint importance_solve(const ScenarioWindow& window, std::size_t subsample_id,
                                 const ControllerParams& pc_star, const Lattice& sizing_lattice,
                                 const PlantModel& model, const EmpcOptions& opts,
                                 const EconomicsSpec& econ, std::size_t budget) {
  // Subsample span (simulated steps plus horizon padding) must reach twice
  // the prediction horizon.
  if (window.sim_hours < pc_star.horizon_hours() - 1e-9)
    throw std::invalid_argument("importance_solve: subsample " + std::to_string(subsample_id) +
                                " shorter than twice the prediction horizon");
  const LatticeObjective objective = [&](const LatticePoint& point) {
    const auto p = sizing_from_lattice(sizing_lattice, point);
    const auto run =
        closed_loop(window.x_hat, window.window, p, pc_star, model, opts, window.sim_hours);
    return window.weight * run.total_cost() + investment(p, econ);
  };
  const auto result =
      pattern_search(objective, sizing_lattice, LatticePoint(sizing_lattice.dims.size(), 0), budget);
  if (std::isinf(result.best_value))
    throw std::runtime_error("importance_solve: every sizing failed on subsample " +
                             std::to_string(subsample_id));
  ImportancePoint point;
  point.subsample_id = subsample_id;
  point.p_star = sizing_from_lattice(sizing_lattice, result.best_point);
  point.v_star = result.best_value;
  point.x_hat = window.x_hat;
  return point;
}

std::pair<std::vector<std::vector<double>>, ScalingSpec> scale_points(
    const std::vector<ImportancePoint>& points, bool enabled, double target_lo,
    double target_hi) {
  if (points.empty()) throw std::invalid_argument("scale_points: empty point set");
  ScalingSpec spec;
  spec.enabled = enabled;
  spec.target_lo = target_lo;
  spec.target_hi = target_hi;
  spec.cost_min = std::numeric_limits<double>::infinity();
  spec.cost_max = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    spec.cost_min = std::min(spec.cost_min, p.v_star);
    spec.cost_max = std::max(spec.cost_max, p.v_star);
  }
  spec.degenerate = enabled && !(spec.cost_max - spec.cost_min > 0.0);

  std::vector<std::vector<double>> coords;
  coords.reserve(points.size());
  for (const auto& p : points) {
    double cost = p.v_star;
    if (enabled) {
      cost = spec.degenerate ? 0.0
                             : target_lo + (p.v_star - spec.cost_min) /
                                               (spec.cost_max - spec.cost_min) *
                                               (target_hi - target_lo);
    }
    coords.push_back({cost, p.p_star.battery_kwh(), p.p_star.pv_m2()});
  }
  return {std::move(coords), spec};
}

namespace {

ClusterModel from_assignment(const ClusterAssignment& assignment,
                             const std::vector<std::vector<double>>& coords,
                             const ScalingSpec& spec, std::uint64_t seed) {
  ClusterModel model;
  model.n_c = assignment.k;
  model.representative_ids = assignment.medoids;
  model.labels = assignment.labels;
  model.within_cluster_max = assignment.within_max;
  model.scaling = spec;
  model.seed = seed;
  model.weights.assign(assignment.k, 0.0);
  for (int label : assignment.labels) model.weights[static_cast<std::size_t>(label)] += 1.0;
  for (auto id : assignment.medoids) model.medoid_coords.push_back(coords[id]);
  return model;
}

}  // namespace

ClusterModel select_representatives(const std::vector<ImportancePoint>& points,
                                    std::size_t k_max, double d_max, std::uint64_t seed,
                                    ClusterMetric metric, bool scaling_enabled) {
  if (k_max < 2) throw std::invalid_argument("select_representatives: k_max must be at least 2");
  if (!(d_max > 0.0)) throw std::invalid_argument("select_representatives: d_max must be positive");
  const std::size_t m = points.size();
  if (m <= 2) return full_cluster_model(m);

  const auto [coords, spec] = scale_points(points, scaling_enabled);
  const std::size_t k_cap = std::min(k_max, m);
  std::size_t k = 2;
  while (true) {
    const auto assignment = kmedoids(coords, k, seed, metric);
    double worst = 0.0;
    for (double v : assignment.within_max) worst = std::max(worst, v);
    if (worst < d_max || k == k_cap) return from_assignment(assignment, coords, spec, seed);
    ++k;
  }
}

ClusterModel cluster_fixed(const std::vector<ImportancePoint>& points, std::size_t n_c,
                           std::uint64_t seed, ClusterMetric metric, bool scaling_enabled) {
  if (n_c == points.size()) {
    auto model = full_cluster_model(points.size());
    model.scaling = scale_points(points, scaling_enabled).second;
    return model;
  }
  const auto [coords, spec] = scale_points(points, scaling_enabled);
  return from_assignment(kmedoids(coords, n_c, seed, metric), coords, spec, seed);
}

ClusterModel full_cluster_model(std::size_t m) {
  ClusterModel model;
  model.n_c = m;
  model.scaling.enabled = false;
  for (std::size_t i = 0; i < m; ++i) {
    model.representative_ids.push_back(i);
    model.weights.push_back(1.0);
    model.labels.push_back(static_cast<int>(i));
    model.within_cluster_max.push_back(0.0);
  }
  return model;
}

void write_points_csv(const std::vector<ImportancePoint>& points, const ClusterModel& model,
                      std::ostream& out) {
  const auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "subsample_id,battery_units,pv_units,v_star,label,weight,is_medoid\n";
  std::vector<char> is_medoid(points.size(), 0);
  for (auto id : model.representative_ids) {
    if (id < points.size()) is_medoid[id] = 1;
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const int label = i < model.labels.size() ? model.labels[i] : -1;
    const double weight =
        label >= 0 && static_cast<std::size_t>(label) < model.weights.size()
            ? model.weights[static_cast<std::size_t>(label)]
            : 0.0;
    out << p.subsample_id << ',' << p.p_star.battery_units << ',' << p.p_star.pv_units << ','
        << fmt(p.v_star) << ',' << label << ',' << fmt(weight) << ','
        << static_cast<int>(is_medoid[i]) << '\n';
  }
}

std::vector<ImportancePoint> load_points_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("points csv: empty stream");
  if (line.rfind("subsample_id,battery_units,pv_units,v_star", 0) != 0)
    throw std::invalid_argument("points csv: unexpected header");
  std::vector<ImportancePoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ImportancePoint p;
    char* cursor = line.data();
    p.subsample_id = std::strtoull(cursor, &cursor, 10);
    p.p_star.battery_units = static_cast<int>(std::strtol(cursor + 1, &cursor, 10));
    p.p_star.pv_units = static_cast<int>(std::strtol(cursor + 1, &cursor, 10));
    p.v_star = std::strtod(cursor + 1, &cursor);
    points.push_back(p);
  }
  if (points.empty()) throw std::invalid_argument("points csv: no rows");
  return points;
}

}  // namespace codesign
