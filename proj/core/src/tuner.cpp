#include "codesign/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "codesign/util.hpp"

namespace codesign {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double j3(const ControllerParams& pc) {
  return pc.n_f - 1.0 / (4.0 * pc.n_x) - 1.0 / (4.0 * pc.n_x * pc.n_s);
}

std::vector<ControllerParams> enumerate_pc(double delta_T_min, double T_d_floor_min, int n_f_lo,
                                           int n_f_hi) {
  if (!(delta_T_min > 0.0) || !(T_d_floor_min > 0.0))
    throw std::invalid_argument("enumerate_pc: durations must be positive");
  if (n_f_lo < 1 || n_f_hi < n_f_lo)
    throw std::invalid_argument("enumerate_pc: bad horizon range");
  const int cap = static_cast<int>(std::floor(delta_T_min / T_d_floor_min + 1e-9));
  std::vector<ControllerParams> lattice;
  for (int n_s = 1; n_s <= cap; ++n_s) {
    for (int n_x = 1; n_s * n_x <= cap; ++n_x) {
      for (int n_f = n_f_lo; n_f <= n_f_hi; ++n_f) {
        ControllerParams pc;
        pc.n_s = n_s;
        pc.n_x = n_x;
        pc.n_f = n_f;
        pc.delta_T_min = delta_T_min;
        pc.T_d_floor_min = T_d_floor_min;
        try {
          pc.validate();
        } catch (const std::invalid_argument&) {
          continue;  // horizon not commensurate with this (n_s, n_x)
        }
        lattice.push_back(pc);
      }
    }
  }
  if (lattice.empty()) throw std::invalid_argument("enumerate_pc: empty lattice");
  return lattice;
}

std::vector<double> aggregate_to_grid(const std::vector<double>& v, double src_hours,
                                      double dst_hours) {
  if (!(src_hours > 0.0) || !(dst_hours > 0.0))
    throw std::invalid_argument("aggregate_to_grid: interval lengths must be positive");
  const double span = static_cast<double>(v.size()) * src_hours;
  const double n_dst_f = span / dst_hours;
  const auto n_dst = static_cast<std::size_t>(std::llround(n_dst_f));
  if (std::fabs(n_dst_f - static_cast<double>(n_dst)) > 1e-6 || n_dst == 0)
    throw std::invalid_argument("aggregate_to_grid: grids do not cover the same span");

  std::vector<double> out(n_dst, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = static_cast<double>(i) * src_hours;
    const double b = a + src_hours;
    // Distribute v[i] over destination bins by fractional overlap.
    auto j = static_cast<std::size_t>(a / dst_hours + 1e-12);
    for (; j < n_dst; ++j) {
      const double lo = static_cast<double>(j) * dst_hours;
      const double hi = lo + dst_hours;
      if (lo >= b - 1e-12) break;
      const double overlap = std::min(b, hi) - std::max(a, lo);
      if (overlap > 1e-12) out[j] += v[i] * (overlap / src_hours);
    }
  }
  return out;
}

ReferenceRun reference_run(const ExogenousSeries& window, double sim_hours,
                           const SizingParams& p, const ControllerParams& pc_ref,
                           const std::vector<SystemState>& x0_set, const PlantModel& model,
                           const EmpcOptions& opts) {
  if (x0_set.empty()) throw std::invalid_argument("reference_run: empty initial-state set");
  // The training window (simulated span plus the trailing forecast) must be
  // at least twice the reference prediction horizon.
  if (sim_hours < pc_ref.horizon_hours() - 1e-9)
    throw std::invalid_argument(
        "reference_run: window must cover at least twice the reference horizon");
  ReferenceRun best;
  double best_total = -kInf;
  for (std::size_t i = 0; i < x0_set.size(); ++i) {
    ClosedLoopResult run;
    try {
      run = closed_loop(x0_set[i], window, p, pc_ref, model, opts, sim_hours);
    } catch (const std::exception& e) {
      throw std::runtime_error("reference_run: closed loop failed for initial state " +
                               std::to_string(i) + ": " + e.what());
    }
    const double total = run.total_cost();
    if (total > best_total) {
      best_total = total;
      best.x_worst = x0_set[i];
      best.v_ref = run.v_cl;
      best.t_s_hours = pc_ref.T_s_hours();
    }
  }
  return best;
}

double j2(const ExogenousSeries& window, double sim_hours, const SizingParams& p,
          const ControllerParams& pc, const ReferenceRun& ref, const PlantModel& model,
          const EmpcOptions& opts) {
  const auto run = closed_loop(ref.x_worst, window, p, pc, model, opts, sim_hours);
  const auto ref_on_candidate = aggregate_to_grid(ref.v_ref, ref.t_s_hours, pc.T_s_hours());
  if (ref_on_candidate.size() != run.v_cl.size())
    throw std::logic_error("j2: grid alignment failed");
  double gap = 0.0;
  for (std::size_t i = 0; i < run.v_cl.size(); ++i)
    gap += std::fabs(run.v_cl[i] - ref_on_candidate[i]);
  return gap;
}

ParetoFront pareto_front(const std::vector<TuningPoint>& points) {
  if (points.empty()) throw std::invalid_argument("pareto_front: empty input");
  ParetoFront front;
  for (const auto& a : points) {
    if (std::isnan(a.j2) || std::isinf(a.j2)) continue;
    bool dominated = false;
    for (const auto& b : points) {
      if (std::isnan(b.j2) || std::isinf(b.j2)) continue;
      const bool not_worse = b.j2 <= a.j2 && b.j3 <= a.j3;
      const bool strictly_better = b.j2 < a.j2 || b.j3 < a.j3;
      if (not_worse && strictly_better) {
        dominated = true;
        break;
      }
      // Duplicate objective values: keep only the lowest lattice index.
      if (b.j2 == a.j2 && b.j3 == a.j3 && b.lattice_index < a.lattice_index) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.points.push_back(a);
  }
  std::sort(front.points.begin(), front.points.end(), [](const TuningPoint& a, const TuningPoint& b) {
    if (a.j3 != b.j3) return a.j3 < b.j3;
    return a.lattice_index < b.lattice_index;
  });
  return front;
}

TuneResult tune(const ExogenousSeries& window, const TuneSetup& setup, const PlantModel& model,
                const EmpcOptions& opts) {
  if (setup.p_samples.empty()) throw std::invalid_argument("tune: no sizing samples");
  if (setup.x0_sets.size() != setup.p_samples.size())
    throw std::invalid_argument("tune: one initial-state set per sizing sample required");
  if (!(setup.epsilon > 0.0) && setup.epsilon != 0.0)
    throw std::invalid_argument("tune: epsilon must be non-negative");

  const auto lattice = enumerate_pc(setup.delta_T_min, setup.T_d_floor_min, setup.n_f_lo,
                                    setup.n_f_hi);
  const std::size_t n_p = setup.p_samples.size();

  // Reference runs per sizing sample (worst initial state).
  std::vector<ReferenceRun> refs(n_p);
  for (std::size_t i = 0; i < n_p; ++i) {
    refs[i] = reference_run(window, setup.sim_hours, setup.p_samples[i], setup.pc_ref,
                            setup.x0_sets[i], model, opts);
  }

  // Evaluate j2 on every (pc, p) pair; failures record +inf.
  std::vector<double> gaps(lattice.size() * n_p, kInf);
  parallel_for(lattice.size() * n_p, setup.threads, [&](std::size_t idx) {
    const std::size_t pc_i = idx / n_p;
    const std::size_t p_i = idx % n_p;
    try {
      gaps[idx] = j2(window, setup.sim_hours, setup.p_samples[p_i], lattice[pc_i], refs[p_i],
                     model, opts);
    } catch (const std::exception&) {
      gaps[idx] = kInf;
    }
  });

  TuneResult result;
  result.lattice.reserve(lattice.size());
  for (std::size_t pc_i = 0; pc_i < lattice.size(); ++pc_i) {
    TuningPoint point;
    point.pc = lattice[pc_i];
    point.lattice_index = pc_i;
    point.j3 = j3(lattice[pc_i]);
    point.j2 = 0.0;
    bool all_failed = true;
    for (std::size_t p_i = 0; p_i < n_p; ++p_i) {
      const double g = gaps[pc_i * n_p + p_i];
      point.j2_per_p.push_back(g);
      point.j2 = std::max(point.j2, g);
      all_failed = all_failed && std::isinf(g);
    }
    if (all_failed) result.excluded.push_back(point.pc.label());
    result.lattice.push_back(std::move(point));
  }

  // Per-sample fronts on (j2 for that sample, j3).
  for (std::size_t p_i = 0; p_i < n_p; ++p_i) {
    std::vector<TuningPoint> view = result.lattice;
    for (auto& point : view) point.j2 = point.j2_per_p[p_i];
    result.fronts.push_back(pareto_front(view));
  }

  // Selection: least j3 among points with worst-case j2 within epsilon.
  const TuningPoint* chosen = nullptr;
  for (const auto& point : result.lattice) {
    if (point.j2 > setup.epsilon) continue;
    if (chosen == nullptr || point.j3 < chosen->j3) chosen = &point;
  }
  if (chosen == nullptr) {
    result.epsilon_satisfied = false;
    for (const auto& point : result.lattice) {
      if (std::isinf(point.j2)) continue;
      if (chosen == nullptr || point.j2 < chosen->j2) chosen = &point;
    }
    if (chosen == nullptr)
      throw std::runtime_error("tune: every lattice point failed its closed loops");
  }
  result.pc_star = chosen->pc;
  return result;
}

void write_tuning_csv(const TuneResult& result, std::ostream& out) {
  out << "n_s,n_x,n_f";
  if (!result.lattice.empty()) {
    for (std::size_t i = 0; i < result.lattice.front().j2_per_p.size(); ++i) out << ",j2_p" << i;
  }
  out << ",max_j2,j3,chosen\n";
  for (const auto& point : result.lattice) {
    out << point.pc.n_s << ',' << point.pc.n_x << ',' << point.pc.n_f;
    for (double g : point.j2_per_p) out << ',' << g;
    const bool chosen = point.pc.n_s == result.pc_star.n_s &&
                        point.pc.n_x == result.pc_star.n_x && point.pc.n_f == result.pc_star.n_f;
    out << ',' << point.j2 << ',' << point.j3 << ',' << (chosen ? 1 : 0) << '\n';
  }
}

}  // namespace codesign
