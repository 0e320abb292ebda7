#pragma once

// Test-only oracles, kept independent of the implementation paths they
// check: vertex enumeration for the simplex, exhaustive scans for the
// monotonicity checkers.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "cymono/lp/simplex.hpp"
#include "cymono/rng.hpp"

namespace cymono::tests {

// Random standard-form LP with a bounded feasible region: the first
// constraint row is strictly positive, and b = A x0 for a random x0 >= 0
// guarantees feasibility.
inline lp::LinearProgram random_bounded_lp(std::size_t rows, std::size_t cols, Rng& rng) {
  lp::LinearProgram p;
  p.objective.resize(cols);
  for (double& c : p.objective) c = rng.uniform(-1.0, 1.0);
  p.constraint_matrix.resize(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      p.constraint_matrix[i * cols + j] =
          i == 0 ? rng.uniform(0.5, 1.5) : rng.uniform(-1.0, 1.0);
  std::vector<double> x0(cols);
  for (double& v : x0) v = rng.uniform(0.0, 1.0);
  p.rhs.assign(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) p.rhs[i] += p.constraint_matrix[i * cols + j] * x0[j];
  return p;
}

// Solve the square system B y = b by Gaussian elimination with partial
// pivoting; false when B is (nearly) singular.
inline bool solve_square(std::vector<double> b_matrix, std::vector<double> rhs,
                         std::vector<double>& out) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(b_matrix[r * n + col]) > std::abs(b_matrix[pivot * n + col])) pivot = r;
    if (std::abs(b_matrix[pivot * n + col]) < 1e-11) return false;
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(b_matrix[pivot * n + k], b_matrix[col * n + k]);
      std::swap(rhs[pivot], rhs[col]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = b_matrix[r * n + col] / b_matrix[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) b_matrix[r * n + k] -= f * b_matrix[col * n + k];
      rhs[r] -= f * rhs[col];
    }
  }
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rhs[i] / b_matrix[i * n + i];
  return true;
}

// Minimum objective over all basic feasible solutions (all column
// subsets of size `rows`). Assumes x >= 0 and full row rank.
inline std::optional<double> enumerate_vertex_optimum(const lp::LinearProgram& p) {
  const std::size_t n = p.cols();
  const std::size_t m = p.rows();
  if (m > n) return std::nullopt;
  std::vector<std::size_t> pick(m);
  for (std::size_t i = 0; i < m; ++i) pick[i] = i;
  std::optional<double> best;
  while (true) {
    std::vector<double> basis_matrix(m * m);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) basis_matrix[r * m + c] = p.constraint_matrix[r * n + pick[c]];
    std::vector<double> xb;
    if (solve_square(basis_matrix, p.rhs, xb)) {
      bool feasible = true;
      for (const double v : xb)
        if (v < -1e-9) feasible = false;
      if (feasible) {
        double value = 0.0;
        for (std::size_t c = 0; c < m; ++c) value += p.objective[pick[c]] * xb[c];
        if (!best || value < *best) best = value;
      }
    }
    // Next combination.
    std::size_t pos = m;
    while (pos > 0 && pick[pos - 1] == n - m + pos - 1) --pos;
    if (pos == 0) break;
    ++pick[pos - 1];
    for (std::size_t q = pos; q < m; ++q) pick[q] = pick[q - 1] + 1;
  }
  return best;
}

}  // namespace cymono::tests
