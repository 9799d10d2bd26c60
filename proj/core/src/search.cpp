#include "codesign/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

namespace codesign {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::size_t Lattice::Dim::count() const {
  if (!(step > 0.0) || up < lo) return 0;
  return static_cast<std::size_t>(std::floor((up - lo) / step + 1e-9)) + 1;
}

std::size_t Lattice::total_points() const {
  std::size_t total = 1;
  for (const auto& d : dims) total *= d.count();
  return total;
}

std::vector<double> Lattice::values(std::span<const int> point) const {
  std::vector<double> v(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) v[i] = dims[i].value(point[i]);
  return v;
}

void Lattice::validate() const {
  if (dims.empty()) throw std::invalid_argument("lattice: no dimensions");
  for (const auto& d : dims) {
    if (!(d.step > 0.0)) throw std::invalid_argument("lattice: step must be positive");
    if (d.up < d.lo) throw std::invalid_argument("lattice: upper bound below lower bound");
  }
}

double risk(std::span<const double> values, RiskMeasure measure) {
  if (values.empty()) throw std::invalid_argument("risk: empty sample");
  if (measure.kind == RiskMeasure::kWorstCase) {
    double worst = values[0];
    for (double v : values) worst = std::max(worst, v);
    return worst;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

namespace {

class CachedObjective {
 public:
  CachedObjective(const LatticeObjective& fn, std::size_t budget) : fn_(fn), budget_(budget) {}

  // Returns false when the evaluation budget is exhausted.
  bool eval(const LatticePoint& p, double& out, std::vector<SearchTraceEntry>& trace) {
    if (auto it = cache_.find(p); it != cache_.end()) {
      out = it->second;
      return true;
    }
    if (evaluations_ >= budget_) return false;
    double v;
    try {
      v = fn_(p);
    } catch (...) {
      v = kInf;
    }
    if (std::isnan(v)) v = kInf;
    ++evaluations_;
    cache_.emplace(p, v);
    incumbent_ = std::min(incumbent_, v);
    trace.push_back({evaluations_, p, v, incumbent_});
    out = v;
    return true;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const LatticeObjective& fn_;
  std::size_t budget_;
  std::size_t evaluations_ = 0;
  double incumbent_ = kInf;
  std::map<LatticePoint, double> cache_;
};

std::vector<LatticePoint> poll_directions(std::size_t dims) {
  std::vector<LatticePoint> dirs;
  // Coordinate polls first.
  for (std::size_t i = 0; i < dims; ++i) {
    LatticePoint d(dims, 0);
    d[i] = 1;
    dirs.push_back(d);
    d[i] = -1;
    dirs.push_back(d);
  }
  if (dims <= 1) return dirs;
  if (dims <= 4) {
    // Full {-1,0,1}^d stencil: low dimension count keeps this cheap and the
    // mixed diagonals matter on constrained integer lattices.
    std::size_t total = 1;
    for (std::size_t i = 0; i < dims; ++i) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      LatticePoint d(dims);
      std::size_t rest = code;
      int nonzero = 0;
      for (std::size_t i = 0; i < dims; ++i) {
        d[i] = static_cast<int>(rest % 3) - 1;
        rest /= 3;
        nonzero += d[i] != 0;
      }
      if (nonzero >= 2) dirs.push_back(std::move(d));  // axes already present
    }
  } else {
    for (std::size_t mask = 0; mask < (1u << dims); ++mask) {
      LatticePoint d(dims);
      for (std::size_t i = 0; i < dims; ++i) d[i] = (mask >> i) & 1u ? 1 : -1;
      dirs.push_back(std::move(d));
    }
  }
  return dirs;
}

}  // namespace

SearchResult pattern_search(const LatticeObjective& objective, const Lattice& lattice,
                            LatticePoint start, std::size_t budget) {
  lattice.validate();
  if (budget < 1) throw std::invalid_argument("pattern_search: budget must be at least 1");
  if (start.size() != lattice.dims.size())
    throw std::invalid_argument("pattern_search: start dimension mismatch");
  std::size_t max_count = 0;
  for (std::size_t i = 0; i < start.size(); ++i) {
    const auto count = lattice.dims[i].count();
    if (start[i] < 0 || static_cast<std::size_t>(start[i]) >= count)
      throw std::invalid_argument("pattern_search: start off the lattice");
    max_count = std::max(max_count, count);
  }

  SearchResult result;
  CachedObjective cache(objective, budget);

  LatticePoint incumbent = std::move(start);
  double best = kInf;
  if (!cache.eval(incumbent, best, result.trace)) {
    result.best_point = incumbent;
    result.best_value = best;
    result.evaluations = cache.evaluations();
    return result;
  }

  const auto dirs = poll_directions(lattice.dims.size());
  long mesh = std::max<long>(1, static_cast<long>(max_count / 8));

  bool out_of_budget = false;
  while (!out_of_budget) {
    LatticePoint poll_best;
    double poll_best_value = kInf;
    for (const auto& dir : dirs) {
      LatticePoint cand = incumbent;
      bool in_range = true;
      for (std::size_t i = 0; i < cand.size(); ++i) {
        cand[i] += static_cast<int>(mesh) * dir[i];
        if (cand[i] < 0 || static_cast<std::size_t>(cand[i]) >= lattice.dims[i].count())
          in_range = false;
      }
      if (!in_range) continue;
      double v;
      if (!cache.eval(cand, v, result.trace)) {
        out_of_budget = true;
        break;
      }
      if (v < poll_best_value ||
          (v == poll_best_value && !poll_best.empty() && cand < poll_best)) {
        poll_best_value = v;
        poll_best = std::move(cand);
      }
    }
    if (out_of_budget) break;
    if (poll_best_value < best) {
      best = poll_best_value;
      incumbent = poll_best;
      mesh = std::min<long>(mesh * 2, std::max<long>(1, static_cast<long>(max_count / 2)));
    } else {
      if (mesh == 1) break;  // refined to the lattice spacing without progress
      mesh /= 2;
    }
  }

  result.best_point = incumbent;
  result.best_value = best;
  result.evaluations = cache.evaluations();
  return result;
}

std::pair<LatticePoint, double> exhaustive(const LatticeObjective& objective,
                                           const Lattice& lattice, std::size_t cap) {
  lattice.validate();
  if (lattice.total_points() > cap)
    throw std::invalid_argument("exhaustive: lattice exceeds the enumeration cap");

  LatticePoint point(lattice.dims.size(), 0);
  LatticePoint best_point;
  double best = kInf;
  bool first = true;
  while (true) {
    double v;
    try {
      v = objective(point);
    } catch (...) {
      v = kInf;
    }
    if (std::isnan(v)) v = kInf;
    if (first || v < best) {
      best = v;
      best_point = point;
      first = false;
    }
    std::size_t i = point.size();
    while (i-- > 0) {
      if (static_cast<std::size_t>(++point[i]) < lattice.dims[i].count()) break;
      point[i] = 0;
      if (i == 0) return {best_point, best};
    }
  }
}

void write_trace_csv(const SearchResult& result, std::ostream& out) {
  out << "eval";
  if (!result.trace.empty()) {
    for (std::size_t i = 0; i < result.trace.front().point.size(); ++i) out << ",p" << i;
  }
  out << ",value,incumbent\n";
  for (const auto& entry : result.trace) {
    out << entry.eval;
    for (int c : entry.point) out << ',' << c;
    out << ',' << entry.value << ',' << entry.incumbent << '\n';
  }
}

}  // namespace codesign
