#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "codesign/constants.hpp"

namespace codesign {

inline constexpr double kLpInf = std::numeric_limits<double>::infinity();

// Sparse LP in bounded-variable form:
//   min c'x   s.t.  row_lo <= A x <= row_up,   var_lo <= x <= var_up.
struct LpProblem {
  struct Row {
    std::vector<int> idx;
    std::vector<double> val;
    double lo = -kLpInf;
    double up = kLpInf;
  };

  std::vector<double> cost;
  std::vector<double> var_lo;
  std::vector<double> var_up;
  std::vector<Row> rows;
  std::vector<std::string> var_names;  // optional; empty or one per variable
  std::vector<std::string> row_names;

  int add_variable(double lo, double up, double c, std::string name = {});
  void add_row(std::vector<int> idx, std::vector<double> val, double lo, double up,
               std::string name = {});

  std::size_t num_vars() const { return cost.size(); }
  std::size_t num_rows() const { return rows.size(); }

  // Throws std::invalid_argument on inconsistent sizes, out-of-range indices
  // or crossed (lo > up) bounds.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;     // +inf for infeasible, -inf for unbounded
  double max_residual = 0.0;  // worst primal bound/row violation at return
  int iterations = 0;
  int phase1_iterations = 0;
  // Filled for optimal solutions: row duals and variable reduced costs.
  std::vector<double> row_duals;
  std::vector<double> reduced_costs;
};

// Per-column basis states for warm starts. A warm-start vector has one entry
// per structural variable followed by one per row slack; exactly num_rows
// entries must be kBasic and the set must be non-singular, otherwise the
// solver falls back to its cold start.
namespace lp_basis {
inline constexpr std::uint8_t kAtLower = 0;
inline constexpr std::uint8_t kAtUpper = 1;
inline constexpr std::uint8_t kBasic = 2;
inline constexpr std::uint8_t kFreeAtZero = 3;
}  // namespace lp_basis

// Basis snapshot for warm-starting a structurally identical LP (or seeding a
// fresh one with a crash basis).
struct LpWarmStart {
  std::vector<std::uint8_t> state;
  bool empty() const { return state.empty(); }
};

// Raised when the simplex exceeds its iteration budget or loses the basis
// numerically; carries diagnostics rather than silently returning garbage.
class SolverStallError : public std::runtime_error {
 public:
  SolverStallError(const std::string& what, int iterations, int phase, double infeasibility)
      : std::runtime_error(what),
        iterations(iterations),
        phase(phase),
        infeasibility(infeasibility) {}
  int iterations;
  int phase;
  double infeasibility;
};

// Revised simplex with bounded variables, Dantzig pricing with a Bland
// anti-cycling fallback, and product-form basis updates. Deterministic:
// ties always resolve to the lowest variable index.
LpSolution solve_lp(const LpProblem& lp, double tol = kLpFeasTol,
                    LpWarmStart* warm = nullptr);

// Test oracle: enumerates all vertices (sets of n active constraints) and
// returns the best feasible one. Detects unboundedness through a boxed
// recession-cone feasibility check. Requires num_vars <= 12.
LpSolution vertex_oracle(const LpProblem& lp);

// Plain-text dump, fixed layout, 17 significant digits.
void dump_lp(const LpProblem& lp, std::ostream& out);

}  // namespace codesign
