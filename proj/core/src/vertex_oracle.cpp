#include <cmath>
#include <optional>
#include <vector>

#include "codesign/linprog.hpp"

namespace codesign {

namespace {

constexpr double kVertexFeasTol = 1e-7;

struct ActiveCandidate {
  std::vector<double> normal;  // dense row of length n
  double rhs = 0.0;
  int pair_id = 0;  // lo/up of the same constraint share an id; both can never be active
};

// Solves the n x n system formed by the chosen active constraints.
// Returns false when (numerically) singular.
bool solve_square(const std::vector<const ActiveCandidate*>& active, std::vector<double>& x) {
  const std::size_t n = active.size();
  std::vector<double> a(n * n);
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = active[i]->normal[j];
    b[i] = active[i]->rhs;
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(a[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(a[i * n + k]);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < 1e-10) return false;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      b[i] -= f * b[k];
    }
  }
  x.resize(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii * n + j] * x[j];
    x[ii] = s / a[ii * n + ii];
  }
  return true;
}

bool feasible(const LpProblem& lp, const std::vector<double>& x) {
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (x[j] < lp.var_lo[j] - kVertexFeasTol || x[j] > lp.var_up[j] + kVertexFeasTol) return false;
  }
  for (const auto& row : lp.rows) {
    double act = 0.0;
    for (std::size_t k = 0; k < row.idx.size(); ++k) act += row.val[k] * x[row.idx[k]];
    if (act < row.lo - kVertexFeasTol || act > row.up + kVertexFeasTol) return false;
  }
  return true;
}

std::vector<ActiveCandidate> build_candidates(const LpProblem& lp) {
  const std::size_t n = lp.num_vars();
  std::vector<ActiveCandidate> cands;
  int pair = 0;
  for (const auto& row : lp.rows) {
    std::vector<double> normal(n, 0.0);
    for (std::size_t k = 0; k < row.idx.size(); ++k) normal[row.idx[k]] = row.val[k];
    if (std::isfinite(row.lo)) cands.push_back({normal, row.lo, pair});
    if (std::isfinite(row.up) && row.up != row.lo) cands.push_back({normal, row.up, pair});
    ++pair;
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> normal(n, 0.0);
    normal[j] = 1.0;
    if (std::isfinite(lp.var_lo[j])) cands.push_back({normal, lp.var_lo[j], pair});
    if (std::isfinite(lp.var_up[j]) && lp.var_up[j] != lp.var_lo[j])
      cands.push_back({normal, lp.var_up[j], pair});
    ++pair;
  }
  return cands;
}

double combination_count(std::size_t k, std::size_t n) {
  double c = 1.0;
  for (std::size_t i = 0; i < n; ++i) c *= static_cast<double>(k - i) / static_cast<double>(i + 1);
  return c;
}

// Enumerates every choice of n active constraints; returns the best feasible
// vertex, or nullopt when none exists.
std::optional<LpSolution> enumerate_best(const LpProblem& lp) {
  const std::size_t n = lp.num_vars();
  const auto cands = build_candidates(lp);
  if (cands.size() < n) return std::nullopt;
  if (combination_count(cands.size(), n) > 4e6)
    throw std::invalid_argument("vertex_oracle: dimension too large for enumeration");

  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;

  std::optional<LpSolution> best;
  std::vector<const ActiveCandidate*> active(n);
  std::vector<double> x;
  while (true) {
    bool duplicate_pair = false;
    for (std::size_t i = 0; i + 1 < n && !duplicate_pair; ++i) {
      if (cands[pick[i]].pair_id == cands[pick[i + 1]].pair_id) duplicate_pair = true;
    }
    if (!duplicate_pair) {
      for (std::size_t i = 0; i < n; ++i) active[i] = &cands[pick[i]];
      if (solve_square(active, x) && feasible(lp, x)) {
        double obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) obj += lp.cost[j] * x[j];
        if (!best || obj < best->objective - 1e-12) {
          LpSolution sol;
          sol.status = LpStatus::kOptimal;
          sol.x = x;
          sol.objective = obj;
          best = std::move(sol);
        }
      }
    }
    // Next lexicographic combination.
    std::size_t i = n;
    while (i-- > 0) {
      if (pick[i] + (n - i) < cands.size()) {
        ++pick[i];
        for (std::size_t l = i + 1; l < n; ++l) pick[l] = pick[l - 1] + 1;
        break;
      }
      if (i == 0) return best;
    }
  }
}

// Recession cone truncated to the unit box: directions d in [-1,1]^n
// respecting every constraint's unbounded sides, with the original cost as
// objective. The LP is unbounded iff the best vertex has c'd < 0 (any
// improving ray rescales into the box, and a linear minimum over the
// truncated cone is attained at a vertex).
LpProblem build_recession(const LpProblem& lp) {
  const std::size_t n = lp.num_vars();
  LpProblem rec;
  for (std::size_t j = 0; j < n; ++j) {
    const bool lo_fin = std::isfinite(lp.var_lo[j]);
    const bool up_fin = std::isfinite(lp.var_up[j]);
    double lo = -1.0, up = 1.0;
    if (lo_fin && up_fin)
      lo = up = 0.0;
    else if (lo_fin)
      lo = 0.0;
    else if (up_fin)
      up = 0.0;
    rec.add_variable(lo, up, lp.cost[j]);
  }
  for (const auto& row : lp.rows) {
    const bool lo_fin = std::isfinite(row.lo);
    const bool up_fin = std::isfinite(row.up);
    double lo = -kLpInf, up = kLpInf;
    if (lo_fin && up_fin)
      lo = up = 0.0;
    else if (lo_fin)
      lo = 0.0;
    else if (up_fin)
      up = 0.0;
    else
      continue;
    rec.add_row(row.idx, row.val, lo, up);
  }
  return rec;
}

}  // namespace

LpSolution vertex_oracle(const LpProblem& lp) {
  lp.validate();
  if (lp.num_vars() > 12)
    throw std::invalid_argument("vertex_oracle: dimension too large (max 12 variables)");
  if (lp.num_vars() == 0) {
    LpSolution sol;
    const std::vector<double> none;
    sol.status = feasible(lp, none) ? LpStatus::kOptimal : LpStatus::kInfeasible;
    sol.objective = sol.status == LpStatus::kOptimal ? 0.0 : kLpInf;
    return sol;
  }

  auto best = enumerate_best(lp);
  if (!best) {
    LpSolution sol;
    sol.status = LpStatus::kInfeasible;
    sol.objective = kLpInf;
    return sol;
  }
  const auto ray = enumerate_best(build_recession(lp));
  if (ray && ray->objective < -1e-7) {
    LpSolution sol;
    sol.status = LpStatus::kUnbounded;
    sol.objective = -kLpInf;
    return sol;
  }
  return *best;
}

}  // namespace codesign
