#include "codesign/linprog.hpp"

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lp_random.hpp"

using namespace codesign;

TEST_CASE("single variable with row bounds") {
  LpProblem lp;
  lp.add_variable(-kLpInf, kLpInf, 1.0, "x");
  lp.add_row({0}, {1.0}, 3.0, kLpInf);
  lp.add_row({0}, {1.0}, -kLpInf, 10.0);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.x[0] == doctest::Approx(3.0));
  CHECK(sol.objective == doctest::Approx(3.0));
  CHECK(sol.max_residual <= kLpFeasTol);

  const auto oracle = vertex_oracle(lp);
  REQUIRE(oracle.status == LpStatus::kOptimal);
  CHECK(oracle.objective == doctest::Approx(sol.objective));
}

TEST_CASE("textbook two-variable LP returns an extreme point") {
  LpProblem lp;
  lp.add_variable(0.0, kLpInf, -1.0, "x");
  lp.add_variable(0.0, kLpInf, -1.0, "y");
  lp.add_row({0, 1}, {1.0, 1.0}, -kLpInf, 1.0);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(-1.0));
  // Vertex: the face constraint is tight and one coordinate sits at zero.
  CHECK(sol.x[0] + sol.x[1] == doctest::Approx(1.0));
  CHECK(std::min(std::fabs(sol.x[0]), std::fabs(sol.x[1])) <= kLpFeasTol);

  const auto oracle = vertex_oracle(lp);
  REQUIRE(oracle.status == LpStatus::kOptimal);
  CHECK(oracle.objective == doctest::Approx(-1.0));
}

TEST_CASE("infeasible and unbounded statuses") {
  SUBCASE("contradictory rows") {
    LpProblem lp;
    lp.add_variable(-kLpInf, kLpInf, 1.0);
    lp.add_row({0}, {1.0}, 2.0, kLpInf);
    lp.add_row({0}, {1.0}, -kLpInf, 1.0);
    CHECK(solve_lp(lp).status == LpStatus::kInfeasible);
    CHECK(vertex_oracle(lp).status == LpStatus::kInfeasible);
  }
  SUBCASE("free improving ray") {
    LpProblem lp;
    lp.add_variable(0.0, kLpInf, -1.0);
    CHECK(solve_lp(lp).status == LpStatus::kUnbounded);
    CHECK(vertex_oracle(lp).status == LpStatus::kUnbounded);
  }
}

TEST_CASE("degenerate ties and fixed variables are handled") {
  LpProblem lp;
  lp.add_variable(2.0, 2.0, 5.0);  // fixed
  lp.add_variable(0.0, 1.0, -1.0);
  lp.add_row({0, 1}, {1.0, 1.0}, -kLpInf, 3.0);
  lp.add_row({0, 1}, {1.0, 1.0}, -kLpInf, 3.0);  // duplicate row forces ties
  const auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.x[0] == doctest::Approx(2.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));
  CHECK(sol.objective == doctest::Approx(9.0));
}

TEST_CASE("random instances agree with the vertex-enumeration oracle") {
  int optimal_seen = 0, infeasible_seen = 0, unbounded_seen = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto family = seed % 5 == 3   ? lptest::Family::kInfeasible
                        : seed % 5 == 4 ? lptest::Family::kUnbounded
                                        : lptest::Family::kBoxed;
    const auto lp = lptest::random_instance(seed, family);
    const auto sol = solve_lp(lp);
    const auto oracle = vertex_oracle(lp);
    INFO("seed ", seed);
    REQUIRE(sol.status == oracle.status);
    switch (sol.status) {
      case LpStatus::kOptimal:
        ++optimal_seen;
        CHECK(sol.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
        CHECK(sol.max_residual <= 10 * kLpFeasTol);
        break;
      case LpStatus::kInfeasible: ++infeasible_seen; break;
      case LpStatus::kUnbounded: ++unbounded_seen; break;
    }
  }
  CHECK(optimal_seen >= 30);
  CHECK(infeasible_seen >= 5);
  CHECK(unbounded_seen >= 5);
}

TEST_CASE("equality-constrained instances agree with the oracle") {
  int solved = 0;
  for (std::uint64_t seed = 400; seed < 460; ++seed) {
    const auto lp = lptest::random_instance(seed, lptest::Family::kEquality);
    const auto sol = solve_lp(lp);
    const auto oracle = vertex_oracle(lp);
    INFO("seed ", seed);
    REQUIRE(sol.status == oracle.status);
    if (sol.status != LpStatus::kOptimal) continue;
    ++solved;
    CHECK(sol.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
    CHECK(sol.max_residual <= 10 * kLpFeasTol);
  }
  CHECK(solved >= 50);  // anchored construction keeps nearly all feasible
}

TEST_CASE("heavily degenerate duplicated rows do not cycle") {
  // Ten copies of the same face plus a fixed variable: every ratio test ties.
  LpProblem lp;
  lp.add_variable(0.0, 1.0, -1.0);
  lp.add_variable(0.0, 1.0, -1.0);
  lp.add_variable(0.5, 0.5, 1.0);
  for (int i = 0; i < 10; ++i) lp.add_row({0, 1, 2}, {1.0, 1.0, 1.0}, -kLpInf, 1.5);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(-0.5));
  CHECK(sol.x[0] + sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("chain-structured control-style LP solves to a certified optimum") {
  // Three-stage state/input chain with equality dynamics; small enough for
  // the vertex oracle (7 variables).
  LpProblem lp;
  std::vector<int> state(4), input(3);
  for (int k = 0; k <= 3; ++k) state[k] = lp.add_variable(0.0, 10.0, 0.0);
  for (int k = 0; k < 3; ++k) input[k] = lp.add_variable(0.0, 2.0, 0.1 + 0.2 * k);
  lp.var_lo[state[0]] = lp.var_up[state[0]] = 5.0;
  lp.var_lo[state[3]] = 6.0;
  for (int k = 0; k < 3; ++k)
    lp.add_row({state[k + 1], state[k], input[k]}, {1.0, -0.9, -1.0}, 0.0, 0.0);
  const auto sol = solve_lp(lp);
  const auto oracle = vertex_oracle(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  REQUIRE(oracle.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(oracle.objective).epsilon(1e-9));
  CHECK(std::fabs(lptest::dual_objective(lp, sol) - sol.objective) <= 1e-8);
}

TEST_CASE("warm start remains correct after cost and bound edits") {
  auto lp = lptest::random_instance(55, lptest::Family::kBoxed);
  LpWarmStart warm;
  const auto first = solve_lp(lp, kLpFeasTol, &warm);
  REQUIRE(first.status == LpStatus::kOptimal);
  // Perturb the problem; the stale basis must still yield the right optimum.
  for (std::size_t j = 0; j < lp.num_vars(); ++j) lp.cost[j] += 0.05 * (j % 3);
  lp.var_up[0] *= 0.5;
  const auto warmed = solve_lp(lp, kLpFeasTol, &warm);
  const auto cold = solve_lp(lp);
  REQUIRE(warmed.status == cold.status);
  CHECK(warmed.objective == doctest::Approx(cold.objective).epsilon(1e-9));
}

TEST_CASE("strong duality certificate on optimal instances") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const auto lp = lptest::random_instance(seed, lptest::Family::kBoxed);
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    const double dual = lptest::dual_objective(lp, sol);
    INFO("seed ", seed);
    CHECK(std::fabs(dual - sol.objective) <= 1e-6 * (1.0 + std::fabs(sol.objective)));
  }
}

TEST_CASE("scaling the cost leaves the optimal point unchanged") {
  for (std::uint64_t seed = 200; seed < 215; ++seed) {
    auto lp = lptest::random_instance(seed, lptest::Family::kBoxed);
    const auto base = solve_lp(lp);
    REQUIRE(base.status == LpStatus::kOptimal);
    const double lambda = 7.5;
    for (auto& c : lp.cost) c *= lambda;
    const auto scaled = solve_lp(lp);
    REQUIRE(scaled.status == LpStatus::kOptimal);
    CHECK(scaled.objective ==
          doctest::Approx(lambda * base.objective).epsilon(1e-9));
    for (std::size_t j = 0; j < lp.num_vars(); ++j) CHECK(scaled.x[j] == base.x[j]);
  }
}

TEST_CASE("warm start reproduces the cold solution") {
  const auto lp = lptest::random_instance(7, lptest::Family::kBoxed);
  LpWarmStart warm;
  const auto cold = solve_lp(lp, kLpFeasTol, &warm);
  REQUIRE(cold.status == LpStatus::kOptimal);
  const auto hot = solve_lp(lp, kLpFeasTol, &warm);
  REQUIRE(hot.status == LpStatus::kOptimal);
  CHECK(hot.iterations <= cold.iterations);
  CHECK(hot.objective == doctest::Approx(cold.objective).epsilon(1e-12));
  for (std::size_t j = 0; j < lp.num_vars(); ++j)
    CHECK(hot.x[j] == doctest::Approx(cold.x[j]).epsilon(1e-9));
}

TEST_CASE("solve is deterministic") {
  const auto lp = lptest::random_instance(31, lptest::Family::kBoxed);
  const auto a = solve_lp(lp);
  const auto b = solve_lp(lp);
  REQUIRE(a.status == b.status);
  CHECK(a.iterations == b.iterations);
  for (std::size_t j = 0; j < lp.num_vars(); ++j) CHECK(a.x[j] == b.x[j]);
}

TEST_CASE("dump_lp emits the fixed plain-text layout") {
  LpProblem lp;
  lp.add_variable(0.0, 1.5, -0.25, "u0");
  lp.add_row({0}, {2.0}, -kLpInf, 3.0, "cap");
  std::ostringstream out;
  dump_lp(lp, out);
  const auto text = out.str();
  CHECK(text.find("lp 1 1") != std::string::npos);
  CHECK(text.find("var 0 0 1.5 -0.25 u0") != std::string::npos);
  CHECK(text.find("row 0 -inf 3 1 0 2 cap") != std::string::npos);
}

TEST_CASE("validate rejects malformed problems") {
  LpProblem lp;
  lp.add_variable(1.0, 0.0, 0.0);  // crossed bounds
  CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
  LpProblem lp2;
  lp2.add_variable(0.0, 1.0, 0.0);
  lp2.add_row({3}, {1.0}, 0.0, 1.0);  // bad index
  CHECK_THROWS_AS(solve_lp(lp2), std::invalid_argument);
}
