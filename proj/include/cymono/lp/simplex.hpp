#pragma once

#include <cstddef>
#include <vector>

#include "cymono/errors.hpp"

namespace cymono::lp {

// min c'x  s.t.  A x = b,  x >= lower (componentwise; empty = all zero).
struct LinearProgram {
  std::vector<double> objective;          // n
  std::vector<double> constraint_matrix;  // row-major, rows x n
  std::vector<double> rhs;                // rows
  std::vector<double> lower_bounds;       // n or empty

  std::size_t rows() const { return rhs.size(); }
  std::size_t cols() const { return objective.size(); }
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPSolution {
  LPStatus status = LPStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<int> basis;  // column index per constraint row (Optimal only)
};

struct LPOptions {
  double feasibility_tol = 1e-8;
  double pivot_tol = 1e-11;
  std::size_t variable_cap = 50'000;
};

// Dense two-phase simplex with Bland's anti-cycling rule. Deterministic:
// the same problem always produces bitwise-identical output.
LPSolution lp_solve(const LinearProgram& problem, const LPOptions& options = {});

}  // namespace cymono::lp
