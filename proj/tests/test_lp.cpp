#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cymono/lp/simplex.hpp"
#include "cymono/rng.hpp"
#include "oracles.hpp"

using namespace cymono;
using lp::LinearProgram;
using lp::LPSolution;
using lp::LPStatus;

TEST_CASE("minimize x subject to x = 1") {
  LinearProgram p;
  p.objective = {1.0};
  p.constraint_matrix = {1.0};
  p.rhs = {1.0};
  const LPSolution s = lp::lp_solve(p);
  REQUIRE(s.status == LPStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.0));
  CHECK(s.x[0] == doctest::Approx(1.0));
}

TEST_CASE("simplex vertex: min -x-y on x+y=1") {
  LinearProgram p;
  p.objective = {-1.0, -1.0};
  p.constraint_matrix = {1.0, 1.0};
  p.rhs = {1.0};
  const LPSolution s = lp::lp_solve(p);
  REQUIRE(s.status == LPStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-1.0));
}

TEST_CASE("infeasible: x = -1 with x >= 0") {
  LinearProgram p;
  p.objective = {0.0};
  p.constraint_matrix = {1.0};
  p.rhs = {-1.0};
  CHECK(lp::lp_solve(p).status == LPStatus::Infeasible);
}

TEST_CASE("unbounded detection") {
  // min -x - y subject to x - y = 0: the ray x = y -> infinity.
  LinearProgram p;
  p.objective = {-1.0, -1.0};
  p.constraint_matrix = {1.0, -1.0};
  p.rhs = {0.0};
  CHECK(lp::lp_solve(p).status == LPStatus::Unbounded);
}

TEST_CASE("lower bounds shift") {
  // min x subject to x + y = 4, x >= 1.5, y >= 2.
  LinearProgram p;
  p.objective = {1.0, 0.0};
  p.constraint_matrix = {1.0, 1.0};
  p.rhs = {4.0};
  p.lower_bounds = {1.5, 2.0};
  const LPSolution s = lp::lp_solve(p);
  REQUIRE(s.status == LPStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.5));
  CHECK(s.x[1] == doctest::Approx(2.5));
}

TEST_CASE("variable cap and bad input") {
  LinearProgram p;
  p.objective = {1.0, 1.0};
  p.constraint_matrix = {1.0, 1.0};
  p.rhs = {1.0};
  lp::LPOptions options;
  options.variable_cap = 1;
  CHECK_THROWS_AS(lp::lp_solve(p, options), CapExceededError);
  p.rhs = {std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(lp::lp_solve(p), InvalidInputError);
}

TEST_CASE("degenerate transport-like LP terminates (Bland)") {
  // Highly degenerate: symmetric costs, multiple optimal bases.
  LinearProgram p;
  p.objective = {0.0, 1.0, 1.0, 0.0};
  p.constraint_matrix = {
      1.0, 1.0, 0.0, 0.0,  //
      0.0, 0.0, 1.0, 1.0,  //
      1.0, 0.0, 1.0, 0.0,  //
  };
  p.rhs = {0.5, 0.5, 0.5};
  const LPSolution s = lp::lp_solve(p);
  REQUIRE(s.status == LPStatus::Optimal);
  CHECK(s.objective == doctest::Approx(0.0));
}

TEST_CASE("deterministic: solving twice is bitwise identical") {
  Rng rng(SeedSequence(7).stream("lp-determinism"));
  for (int trial = 0; trial < 20; ++trial) {
    const LinearProgram p = tests::random_bounded_lp(3, 6, rng);
    const LPSolution a = lp::lp_solve(p);
    const LPSolution b = lp::lp_solve(p);
    REQUIRE(a.status == b.status);
    if (a.status != LPStatus::Optimal) continue;
    CHECK(a.objective == b.objective);
    CHECK(a.x == b.x);
    CHECK(a.basis == b.basis);
  }
}

TEST_CASE("matches vertex enumeration on random bounded programs") {
  Rng rng(SeedSequence(11).stream("lp-oracle"));
  int optimal = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const LinearProgram p = tests::random_bounded_lp(3, 6, rng);
    const LPSolution s = lp::lp_solve(p);
    REQUIRE(s.status == LPStatus::Optimal);
    const auto oracle = tests::enumerate_vertex_optimum(p);
    REQUIRE(oracle.has_value());
    CHECK(std::abs(s.objective - *oracle) <= 1e-9);
    ++optimal;
  }
  CHECK(optimal == 50);
}

TEST_CASE("feasibility certification on optimal solutions") {
  Rng rng(SeedSequence(13).stream("lp-feas"));
  for (int trial = 0; trial < 20; ++trial) {
    const LinearProgram p = tests::random_bounded_lp(4, 7, rng);
    const LPSolution s = lp::lp_solve(p);
    REQUIRE(s.status == LPStatus::Optimal);
    for (std::size_t i = 0; i < p.rows(); ++i) {
      double residual = -p.rhs[i];
      for (std::size_t j = 0; j < p.cols(); ++j)
        residual += p.constraint_matrix[i * p.cols() + j] * s.x[j];
      CHECK(std::abs(residual) <= 1e-8);
    }
    for (const double v : s.x) CHECK(v >= -1e-10);
  }
}
