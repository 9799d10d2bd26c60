#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace codesign {

// Finite granular search space: each dimension is an arithmetic progression
// lo, lo+step, ..., up. Points are addressed by integer indices per dimension.
struct Lattice {
  struct Dim {
    double lo = 0.0;
    double up = 0.0;
    double step = 1.0;
    std::size_t count() const;
    double value(int index) const { return lo + step * index; }
  };
  std::vector<Dim> dims;

  std::size_t total_points() const;
  std::vector<double> values(std::span<const int> point) const;
  void validate() const;
};

using LatticePoint = std::vector<int>;
using LatticeObjective = std::function<double(const LatticePoint&)>;

struct RiskMeasure {
  enum Kind { kExpectation, kWorstCase };
  Kind kind = kExpectation;
};

// Expectation (ordered mean) or worst-case max of a non-empty sample.
double risk(std::span<const double> values, RiskMeasure measure);

struct SearchTraceEntry {
  std::size_t eval = 0;
  LatticePoint point;
  double value = 0.0;
  double incumbent = 0.0;
};

struct SearchResult {
  LatticePoint best_point;
  double best_value = 0.0;
  std::size_t evaluations = 0;
  std::vector<SearchTraceEntry> trace;
};

// Deterministic pattern search on the lattice: full coordinate + diagonal
// polls, mesh multiplier doubling on success and halving on failure, hard
// stop at `budget` objective evaluations. Objective failures (thrown
// exceptions or non-finite values) count as +inf and are recorded in the
// trace. Repeat visits are served from a cache and do not consume budget.
SearchResult pattern_search(const LatticeObjective& objective, const Lattice& lattice,
                            LatticePoint start, std::size_t budget);

// Full scan in lexicographic order; ties keep the lexicographically smallest
// point. Throws if the lattice exceeds `cap` points.
std::pair<LatticePoint, double> exhaustive(const LatticeObjective& objective,
                                           const Lattice& lattice, std::size_t cap = 200000);

void write_trace_csv(const SearchResult& result, std::ostream& out);

}  // namespace codesign
