#include "codesign/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <utility>

namespace codesign {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-11;
constexpr double kDegenStep = 1e-10;
constexpr int kDegenLimit = 50;
constexpr int kRefactorEvery = 64;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Dense LU with partial pivoting, LAPACK-style ipiv row interchanges.
class LuFactors {
 public:
  bool factor(std::vector<double> a, std::size_t m) {
    m_ = m;
    lu_ = std::move(a);
    ipiv_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t piv = k;
      double best = std::fabs(lu_[k * m + k]);
      for (std::size_t i = k + 1; i < m; ++i) {
        const double v = std::fabs(lu_[i * m + k]);
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best < 1e-12) return false;
      ipiv_[k] = static_cast<int>(piv);
      if (piv != k) {
        for (std::size_t j = 0; j < m; ++j) std::swap(lu_[k * m + j], lu_[piv * m + j]);
      }
      const double d = lu_[k * m + k];
      for (std::size_t i = k + 1; i < m; ++i) {
        const double f = lu_[i * m + k] / d;
        lu_[i * m + k] = f;
        if (f == 0.0) continue;
        for (std::size_t j = k + 1; j < m; ++j) lu_[i * m + j] -= f * lu_[k * m + j];
      }
    }
    return true;
  }

  // Solves B v = rhs in place.
  void solve(std::vector<double>& v) const {
    const std::size_t m = m_;
    for (std::size_t k = 0; k < m; ++k) {
      if (ipiv_[k] != static_cast<int>(k)) std::swap(v[k], v[ipiv_[k]]);
    }
    // With unit-lower L, the solution is zero above the first nonzero of the
    // permuted rhs; entering columns are sparse, so this skips most rows.
    std::size_t first = 0;
    while (first < m && v[first] == 0.0) ++first;
    for (std::size_t i = first + 1; i < m; ++i) {
      double s = v[i];
      const double* row = &lu_[i * m];
      for (std::size_t j = first; j < i; ++j) s -= row[j] * v[j];
      v[i] = s;
    }
    for (std::size_t ii = m; ii-- > 0;) {
      double s = v[ii];
      const double* row = &lu_[ii * m];
      for (std::size_t j = ii + 1; j < m; ++j) s -= row[j] * v[j];
      v[ii] = s / row[ii];
    }
  }

  // Solves B' y = rhs in place.
  void solve_transpose(std::vector<double>& v) const {
    const std::size_t m = m_;
    // U' z = rhs (U' lower triangular)
    for (std::size_t i = 0; i < m; ++i) {
      double s = v[i];
      for (std::size_t j = 0; j < i; ++j) s -= lu_[j * m + i] * v[j];
      v[i] = s / lu_[i * m + i];
    }
    // L' w = z (L' unit upper triangular)
    for (std::size_t ii = m; ii-- > 0;) {
      double s = v[ii];
      for (std::size_t j = ii + 1; j < m; ++j) s -= lu_[j * m + ii] * v[j];
      v[ii] = s;
    }
    for (std::size_t kk = m; kk-- > 0;) {
      if (ipiv_[kk] != static_cast<int>(kk)) std::swap(v[kk], v[ipiv_[kk]]);
    }
  }

 private:
  std::size_t m_ = 0;
  std::vector<double> lu_;
  std::vector<int> ipiv_;
};

enum VarState : std::uint8_t {
  kAtLower = lp_basis::kAtLower,
  kAtUpper = lp_basis::kAtUpper,
  kBasic = lp_basis::kBasic,
  kFreeAtZero = lp_basis::kFreeAtZero,
};

class SimplexSolver {
 public:
  SimplexSolver(const LpProblem& lp, double tol) : ftol_(tol) {
    n_ = lp.num_vars();
    m_ = lp.num_rows();
    total_ = n_ + m_;
    lo_.resize(total_);
    up_.resize(total_);
    cost_.assign(total_, 0.0);
    cols_.resize(total_);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lp.var_lo[j];
      up_[j] = lp.var_up[j];
      cost_[j] = lp.cost[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = lp.rows[i];
      for (std::size_t k = 0; k < row.idx.size(); ++k) {
        if (row.val[k] != 0.0) cols_[row.idx[k]].emplace_back(static_cast<int>(i), row.val[k]);
      }
      // Slack column: A x - s = 0 with s constrained to the row bounds.
      lo_[n_ + i] = row.lo;
      up_[n_ + i] = row.up;
      cols_[n_ + i].emplace_back(static_cast<int>(i), -1.0);
    }
  }

  LpSolution run(LpWarmStart* warm) {
    if (!restore_basis(warm)) cold_basis();
    refactorize();

    LpSolution sol;
    const int phase1 = iterate(/*phase1=*/true);
    sol.phase1_iterations = phase1;
    if (max_infeasibility() > 10.0 * ftol_) {
      sol.status = LpStatus::kInfeasible;
      sol.objective = kLpInf;
      sol.iterations = phase1;
      sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
      save_basis(warm);
      return sol;
    }
    refactorize();
    const int phase2 = iterate(/*phase1=*/false);
    sol.iterations = phase1 + phase2;
    if (unbounded_) {
      sol.status = LpStatus::kUnbounded;
      sol.objective = -kLpInf;
      sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
      save_basis(warm);
      return sol;
    }
    sol.status = LpStatus::kOptimal;
    sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    double obj = 0.0;
    for (std::size_t j = 0; j < n_; ++j) obj += cost_[j] * x_[j];
    sol.objective = obj;
    sol.max_residual = primal_residual();
    fill_duals(sol);
    save_basis(warm);
    return sol;
  }

 private:
  // ---- basis management -------------------------------------------------

  void cold_basis() {
    state_.assign(total_, kAtLower);
    basic_.resize(m_);
    for (std::size_t j = 0; j < n_; ++j) state_[j] = nearest_bound_state(j);
    for (std::size_t i = 0; i < m_; ++i) {
      basic_[i] = static_cast<int>(n_ + i);
      state_[n_ + i] = kBasic;
    }
  }

  VarState nearest_bound_state(std::size_t j) const {
    const bool lo_fin = std::isfinite(lo_[j]);
    const bool up_fin = std::isfinite(up_[j]);
    if (!lo_fin && !up_fin) return kFreeAtZero;
    if (!lo_fin) return kAtUpper;
    if (!up_fin) return kAtLower;
    return (std::fabs(lo_[j]) <= std::fabs(up_[j])) ? kAtLower : kAtUpper;
  }

  bool restore_basis(const LpWarmStart* warm) {
    if (warm == nullptr || warm->state.size() != total_) return false;
    std::size_t count = 0;
    for (auto s : warm->state)
      if (s == kBasic) ++count;
    if (count != m_) return false;
    state_ = warm->state;
    basic_.clear();
    basic_.reserve(m_);
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] == kBasic) basic_.push_back(static_cast<int>(j));
      // A warm bound state pointing at an infinite bound is not usable.
      if (state_[j] == kAtLower && !std::isfinite(lo_[j])) return false;
      if (state_[j] == kAtUpper && !std::isfinite(up_[j])) return false;
    }
    // Reject singular warm bases by test-factorizing.
    if (!try_factor()) return false;
    return true;
  }

  void save_basis(LpWarmStart* warm) const {
    if (warm != nullptr) warm->state = state_;
  }

  bool try_factor() {
    std::vector<double> dense(m_ * m_, 0.0);
    for (std::size_t s = 0; s < m_; ++s) {
      for (const auto& [i, v] : cols_[basic_[s]]) dense[static_cast<std::size_t>(i) * m_ + s] = v;
    }
    return lu_.factor(std::move(dense), m_);
  }

  void refactorize() {
    if (!try_factor())
      throw SolverStallError("lp: basis became singular", iterations_, phase_, max_infeasibility());
    etas_.clear();
    recompute_primal();
  }

  void recompute_primal() {
    x_.assign(total_, 0.0);
    std::vector<double> rhs(m_, 0.0);
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] == kBasic) continue;
      const double xj = state_[j] == kAtLower ? lo_[j] : state_[j] == kAtUpper ? up_[j] : 0.0;
      x_[j] = xj;
      if (xj == 0.0) continue;
      for (const auto& [i, v] : cols_[j]) rhs[static_cast<std::size_t>(i)] -= v * xj;
    }
    ftran(rhs);
    for (std::size_t s = 0; s < m_; ++s) x_[basic_[s]] = rhs[s];
  }

  // ---- linear algebra ----------------------------------------------------

  void ftran(std::vector<double>& v) const {
    if (m_ == 0) return;
    lu_.solve(v);
    for (const auto& eta : etas_) {
      const double piv = v[eta.slot] / eta.col[eta.slot];
      if (piv != 0.0) {
        for (std::size_t i = 0; i < m_; ++i) v[i] -= eta.col[i] * piv;
        v[eta.slot] = piv;
      } else {
        v[eta.slot] = 0.0;
      }
    }
  }

  void btran(std::vector<double>& v) const {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double dot = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (i != static_cast<std::size_t>(it->slot)) dot += it->col[i] * v[i];
      }
      v[it->slot] = (v[it->slot] - dot) / it->col[it->slot];
    }
    lu_.solve_transpose(v);
  }

  std::vector<double> column_ftran(std::size_t j) const {
    std::vector<double> h(m_, 0.0);
    for (const auto& [i, v] : cols_[j]) h[static_cast<std::size_t>(i)] = v;
    ftran(h);
    return h;
  }

  // ---- diagnostics -------------------------------------------------------

  void fill_duals(LpSolution& sol) const {
    std::vector<double> y(m_);
    for (std::size_t s = 0; s < m_; ++s) y[s] = cost_[basic_[s]];
    btran(y);
    sol.row_duals = y;
    sol.reduced_costs.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      double d = cost_[j];
      for (const auto& [i, v] : cols_[j]) d -= y[static_cast<std::size_t>(i)] * v;
      sol.reduced_costs[j] = d;
    }
  }

  double max_infeasibility() const {
    double worst = 0.0;
    for (std::size_t s = 0; s < m_; ++s) {
      const int j = basic_[s];
      worst = std::max(worst, lo_[j] - x_[j]);
      worst = std::max(worst, x_[j] - up_[j]);
    }
    return std::max(0.0, worst);
  }

  double primal_residual() const {
    double worst = max_infeasibility();
    // Row residuals: W z = 0 by construction; re-check against drift.
    std::vector<double> act(m_, 0.0);
    for (std::size_t j = 0; j < total_; ++j) {
      if (x_[j] == 0.0) continue;
      for (const auto& [i, v] : cols_[j]) act[static_cast<std::size_t>(i)] += v * x_[j];
    }
    for (std::size_t i = 0; i < m_; ++i) worst = std::max(worst, std::fabs(act[i]));
    return worst;
  }

  // ---- simplex core -------------------------------------------------------

  // Phase-1 gradient of the total infeasibility wrt each basic slot.
  void phase1_gradient(std::vector<double>& g) const {
    g.assign(m_, 0.0);
    for (std::size_t s = 0; s < m_; ++s) {
      const int j = basic_[s];
      if (x_[j] < lo_[j] - ftol_)
        g[s] = -1.0;
      else if (x_[j] > up_[j] + ftol_)
        g[s] = 1.0;
    }
  }

  struct Candidate {
    int j = -1;
    int dir = 0;
    double score = 0.0;
  };

  // Runs one phase to completion; returns the iteration count for the phase.
  int iterate(bool phase1) {
    phase_ = phase1 ? 1 : 2;
    unbounded_ = false;
    int iters = 0;
    int degen_streak = 0;
    bool bland = false;
    int since_refactor = 0;
    const long max_iters = 200L * static_cast<long>(total_ + 16) + 20000L;

    std::vector<double> y(m_);
    std::vector<Candidate> cands;

    while (true) {
      if (iterations_ + iters > max_iters)
        throw SolverStallError("lp: iteration limit exceeded", iterations_ + iters, phase_,
                               max_infeasibility());
      if (phase1) {
        phase1_gradient(y);
        bool any = false;
        for (double v : y) any = any || v != 0.0;
        if (!any) break;  // primal feasible
        btran(y);
      } else {
        for (std::size_t s = 0; s < m_; ++s) y[s] = cost_[basic_[s]];
        btran(y);
      }

      // Pricing: reduced cost d_j = c_j - y' W_j (phase 1: c = 0).
      cands.clear();
      for (std::size_t j = 0; j < total_; ++j) {
        if (state_[j] == kBasic) continue;
        double d = phase1 ? 0.0 : cost_[j];
        for (const auto& [i, v] : cols_[j]) d -= y[static_cast<std::size_t>(i)] * v;
        const double tol = phase1 ? 1e-9 : kLpOptTol;
        int dir = 0;
        if (state_[j] == kAtLower && d < -tol)
          dir = 1;
        else if (state_[j] == kAtUpper && d > tol)
          dir = -1;
        else if (state_[j] == kFreeAtZero && std::fabs(d) > tol)
          dir = d < 0 ? 1 : -1;
        if (dir == 0) continue;
        cands.push_back(Candidate{static_cast<int>(j), dir, std::fabs(d)});
      }
      if (cands.empty()) break;  // phase optimal
      if (!bland) {
        // Dantzig: largest |d| first, lowest index on ties. Under Bland the
        // natural ascending-index order is kept as-is.
        std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
          if (a.score != b.score) return a.score > b.score;
          return a.j < b.j;
        });
        if (cands.size() > 8) cands.resize(8);
      }

      bool pivoted = false;
      for (const auto& cand : cands) {
        const int result = try_pivot(cand, phase1);
        if (result == 1) {
          pivoted = true;
          break;
        }
        if (result == 2) {  // unbounded direction
          if (phase1)
            throw SolverStallError("lp: phase-1 direction unbounded", iterations_ + iters, phase_,
                                   max_infeasibility());
          unbounded_ = true;
          iterations_ += iters;
          return iters;
        }
      }
      if (!pivoted) {
        // All shortlisted pivots were numerically unusable; rebuild and retry
        // once, then give up with diagnostics.
        if (!retried_after_refactor_) {
          retried_after_refactor_ = true;
          refactorize();
          continue;
        }
        throw SolverStallError("lp: no usable pivot", iterations_ + iters, phase_,
                               max_infeasibility());
      }
      retried_after_refactor_ = false;
      ++iters;

      if (last_step_ <= kDegenStep) {
        if (++degen_streak > kDegenLimit) bland = true;
      } else {
        degen_streak = 0;
        bland = false;
      }
      if (++since_refactor >= kRefactorEvery) {
        refactorize();
        since_refactor = 0;
      }
    }
    iterations_ += iters;
    return iters;
  }

  // Returns 0 if the pivot is numerically unusable, 1 on success, 2 when the
  // direction is unblocked (unbounded).
  int try_pivot(const Candidate& cand, bool phase1) {
    const auto j = static_cast<std::size_t>(cand.j);
    const double sigma = cand.dir;
    std::vector<double> h = column_ftran(j);

    // Bound-flip distance of the entering variable itself.
    double t_best = kLpInf;
    if (std::isfinite(lo_[j]) && std::isfinite(up_[j])) t_best = up_[j] - lo_[j];
    int blocker = -1;  // -1 = bound flip
    int blocker_var = cand.j;
    double blocker_bound = 0.0;

    for (std::size_t s = 0; s < m_; ++s) {
      const double delta = -sigma * h[s];
      if (std::fabs(delta) < kDropTol) continue;
      const int b = basic_[s];
      const double xb = x_[b];
      double ratio;
      double bound;
      if (phase1 && xb < lo_[b] - ftol_) {
        if (delta <= 0.0) continue;  // moves further below; rate already priced
        bound = lo_[b];
        ratio = (bound - xb) / delta;
      } else if (phase1 && xb > up_[b] + ftol_) {
        if (delta >= 0.0) continue;
        bound = up_[b];
        ratio = (bound - xb) / delta;
      } else if (delta > 0.0) {
        if (!std::isfinite(up_[b])) continue;
        bound = up_[b];
        ratio = (bound - xb) / delta;
      } else {
        if (!std::isfinite(lo_[b])) continue;
        bound = lo_[b];
        ratio = (bound - xb) / delta;
      }
      if (ratio < 0.0) ratio = 0.0;
      if (ratio < t_best - 1e-12 || (ratio < t_best + 1e-12 && b < blocker_var)) {
        t_best = ratio;
        blocker = static_cast<int>(s);
        blocker_var = b;
        blocker_bound = bound;
      }
    }

    if (!std::isfinite(t_best)) return 2;

    if (blocker >= 0 && std::fabs(h[static_cast<std::size_t>(blocker)]) < kPivotTol)
      return 0;  // unusable pivot element

    // Apply the step.
    last_step_ = t_best;
    if (t_best != 0.0) {
      for (std::size_t s = 0; s < m_; ++s) {
        const double delta = -sigma * h[s];
        if (delta != 0.0) x_[basic_[s]] += delta * t_best;
      }
    }

    if (blocker < 0) {
      // Bound flip: entering variable crosses its box, basis unchanged.
      state_[j] = state_[j] == kAtLower ? kAtUpper : kAtLower;
      x_[j] = state_[j] == kAtLower ? lo_[j] : up_[j];
      return 1;
    }

    const int leaving = basic_[static_cast<std::size_t>(blocker)];
    x_[leaving] = blocker_bound;  // snap exactly onto the blocking bound
    state_[leaving] = blocker_bound == lo_[leaving] ? kAtLower : kAtUpper;
    x_[j] = (state_[j] == kAtLower   ? lo_[j]
             : state_[j] == kAtUpper ? up_[j]
                                     : 0.0) +
            sigma * t_best;
    state_[j] = kBasic;
    basic_[static_cast<std::size_t>(blocker)] = cand.j;
    etas_.push_back(Eta{blocker, std::move(h)});
    return 1;
  }

  struct Eta {
    int slot;
    std::vector<double> col;
  };

  double ftol_;
  std::size_t n_ = 0, m_ = 0, total_ = 0;
  std::vector<double> lo_, up_, cost_;
  std::vector<std::vector<std::pair<int, double>>> cols_;

  std::vector<int> basic_;
  std::vector<std::uint8_t> state_;
  std::vector<double> x_;
  LuFactors lu_;
  std::vector<Eta> etas_;

  long iterations_ = 0;
  int phase_ = 1;
  bool unbounded_ = false;
  bool retried_after_refactor_ = false;
  double last_step_ = 0.0;
};

}  // namespace

int LpProblem::add_variable(double lo, double up, double c, std::string name) {
  var_lo.push_back(lo);
  var_up.push_back(up);
  cost.push_back(c);
  if (!name.empty() || !var_names.empty()) {
    var_names.resize(cost.size() - 1);
    var_names.push_back(std::move(name));
  }
  return static_cast<int>(cost.size()) - 1;
}

void LpProblem::add_row(std::vector<int> idx, std::vector<double> val, double lo, double up,
                        std::string name) {
  Row row;
  row.idx = std::move(idx);
  row.val = std::move(val);
  row.lo = lo;
  row.up = up;
  rows.push_back(std::move(row));
  if (!name.empty() || !row_names.empty()) {
    row_names.resize(rows.size() - 1);
    row_names.push_back(std::move(name));
  }
}

void LpProblem::validate() const {
  const auto n = num_vars();
  if (var_lo.size() != n || var_up.size() != n)
    throw std::invalid_argument("lp: bound arrays inconsistent with cost vector");
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(var_lo[j]) || std::isnan(var_up[j]) || std::isnan(cost[j]))
      throw std::invalid_argument("lp: NaN in variable data");
    if (var_lo[j] > var_up[j])
      throw std::invalid_argument("lp: variable " + std::to_string(j) + " has lo > up");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.idx.size() != row.val.size())
      throw std::invalid_argument("lp: row " + std::to_string(i) + " index/value size mismatch");
    if (row.lo > row.up)
      throw std::invalid_argument("lp: row " + std::to_string(i) + " has lo > up");
    for (int j : row.idx) {
      if (j < 0 || static_cast<std::size_t>(j) >= n)
        throw std::invalid_argument("lp: row " + std::to_string(i) + " references variable " +
                                    std::to_string(j));
    }
  }
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
  }
  return "unknown";
}

LpSolution solve_lp(const LpProblem& lp, double tol, LpWarmStart* warm) {
  lp.validate();
  SimplexSolver solver(lp, tol);
  return solver.run(warm);
}

void dump_lp(const LpProblem& lp, std::ostream& out) {
  out << "lp " << lp.num_vars() << ' ' << lp.num_rows() << '\n';
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    out << "var " << j << ' ' << fmt(lp.var_lo[j]) << ' ' << fmt(lp.var_up[j]) << ' '
        << fmt(lp.cost[j]);
    if (j < lp.var_names.size() && !lp.var_names[j].empty()) out << ' ' << lp.var_names[j];
    out << '\n';
  }
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const auto& row = lp.rows[i];
    out << "row " << i << ' ' << fmt(row.lo) << ' ' << fmt(row.up) << ' ' << row.idx.size();
    for (std::size_t k = 0; k < row.idx.size(); ++k)
      out << ' ' << row.idx[k] << ' ' << fmt(row.val[k]);
    if (i < lp.row_names.size() && !lp.row_names[i].empty()) out << ' ' << lp.row_names[i];
    out << '\n';
  }
}

}  // namespace codesign
