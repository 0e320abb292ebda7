#include "cymono/lp/simplex.hpp"

#include <cmath>
#include <string>

namespace cymono::lp {

namespace {

class Tableau {
 public:
  Tableau(const LinearProgram& p, const LPOptions& opt)
      : opt_(opt), n_(p.cols()), rows_(p.rows()), width_(p.cols() + p.rows() + 1) {
    data_.assign(rows_ * width_, 0.0);
    basis_.assign(rows_, 0);
    shifted_rhs_ = p.rhs;
    if (!p.lower_bounds.empty()) {
      for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j)
          s += p.constraint_matrix[i * n_ + j] * p.lower_bounds[j];
        shifted_rhs_[i] -= s;
      }
    }
    for (std::size_t i = 0; i < rows_; ++i) {
      const double sign = shifted_rhs_[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j)
        at(i, j) = sign * p.constraint_matrix[i * n_ + j];
      at(i, n_ + i) = 1.0;
      rhs(i) = sign * shifted_rhs_[i];
      basis_[i] = static_cast<int>(n_ + i);
    }
  }

  double& at(std::size_t i, std::size_t j) { return data_[i * width_ + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * width_ + j]; }
  double& rhs(std::size_t i) { return data_[i * width_ + width_ - 1]; }
  double rhs(std::size_t i) const { return data_[i * width_ + width_ - 1]; }

  std::size_t rows() const { return rows_; }
  std::size_t structural() const { return n_; }
  int basis(std::size_t i) const { return basis_[i]; }

  void pivot(std::size_t r, std::size_t j) {
    const double piv = at(r, j);
    for (std::size_t k = 0; k < width_; ++k) data_[r * width_ + k] /= piv;
    at(r, j) = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double factor = at(i, j);
      if (factor == 0.0) continue;
      for (std::size_t k = 0; k < width_; ++k)
        data_[i * width_ + k] -= factor * data_[r * width_ + k];
      at(i, j) = 0.0;
    }
    basis_[r] = static_cast<int>(j);
  }

  // Bland's rule: entering = smallest column index with a reduced cost
  // below -pivot_tol; leaving = min-ratio row, ties by smallest basic
  // variable index. Returns false at optimality, throws on unbounded.
  bool bland_step(const std::vector<double>& cost, std::size_t column_limit, bool* unbounded) {
    std::size_t enter = width_;
    for (std::size_t j = 0; j < column_limit; ++j) {
      double reduced = cost[j];
      for (std::size_t i = 0; i < rows_; ++i) {
        const int b = basis_[i];
        if (cost[static_cast<std::size_t>(b)] != 0.0)
          reduced -= cost[static_cast<std::size_t>(b)] * at(i, j);
      }
      if (reduced < -opt_.pivot_tol) {
        enter = j;
        break;
      }
    }
    if (enter == width_) return false;

    std::size_t leave = rows_;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double a = at(i, enter);
      if (a <= opt_.pivot_tol) continue;
      const double ratio = std::max(rhs(i), 0.0) / a;
      if (leave == rows_ || ratio < best_ratio ||
          (ratio == best_ratio && basis_[i] < basis_[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == rows_) {
      *unbounded = true;
      return false;
    }
    pivot(leave, enter);
    return true;
  }

  double objective_of_basis(const std::vector<double>& cost) const {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
      s += cost[static_cast<std::size_t>(basis_[i])] * rhs(i);
    return s;
  }

  // Pivot basic artificials onto structural columns; rows that admit no
  // structural pivot are redundant and get dropped.
  void purge_artificials() {
    for (std::size_t i = 0; i < rows_;) {
      if (basis_[i] < static_cast<int>(n_)) {
        ++i;
        continue;
      }
      std::size_t col = n_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (std::abs(at(i, j)) > opt_.pivot_tol) {
          col = j;
          break;
        }
      }
      if (col < n_) {
        pivot(i, col);
        ++i;
      } else {
        erase_row(i);
      }
    }
  }

 private:
  void erase_row(std::size_t r) {
    data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * width_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * width_));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

  LPOptions opt_;
  std::size_t n_;
  std::size_t rows_;
  std::size_t width_;
  std::vector<double> data_;
  std::vector<int> basis_;
  std::vector<double> shifted_rhs_;
};

}  // namespace

LPSolution lp_solve(const LinearProgram& problem, const LPOptions& options) {
  const std::size_t n = problem.cols();
  const std::size_t m = problem.rows();
  if (n == 0) throw InvalidInputError("linear program has no variables");
  if (n > options.variable_cap)
    throw CapExceededError("linear program has " + std::to_string(n) +
                           " variables, cap is " + std::to_string(options.variable_cap));
  if (problem.constraint_matrix.size() != n * m || problem.rhs.size() != m)
    throw InvalidInputError("linear program dimensions are inconsistent");
  if (!problem.lower_bounds.empty() && problem.lower_bounds.size() != n)
    throw InvalidInputError("lower bound count does not match variables");
  auto check_finite = [](const std::vector<double>& v, const char* what) {
    for (const double x : v)
      if (!std::isfinite(x)) throw InvalidInputError(std::string(what) + " has a non-finite entry");
  };
  check_finite(problem.objective, "objective");
  check_finite(problem.constraint_matrix, "constraint matrix");
  check_finite(problem.rhs, "rhs");
  check_finite(problem.lower_bounds, "lower bounds");

  Tableau tableau(problem, options);

  // Phase 1: minimize the artificial sum.
  std::vector<double> phase1_cost(n + m + 1, 0.0);
  for (std::size_t j = n; j < n + m; ++j) phase1_cost[j] = 1.0;
  bool unbounded = false;
  while (tableau.bland_step(phase1_cost, n + m, &unbounded)) {
  }
  if (unbounded) throw Error("phase-1 simplex reported unbounded");
  if (tableau.objective_of_basis(phase1_cost) > options.feasibility_tol)
    return LPSolution{LPStatus::Infeasible, {}, 0.0, {}};
  tableau.purge_artificials();

  // Phase 2: original costs, entering restricted to structural columns.
  std::vector<double> cost(n + m + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = problem.objective[j];
  unbounded = false;
  while (tableau.bland_step(cost, n, &unbounded)) {
  }
  if (unbounded) return LPSolution{LPStatus::Unbounded, {}, 0.0, {}};

  LPSolution solution;
  solution.status = LPStatus::Optimal;
  solution.x.assign(n, 0.0);
  for (std::size_t i = 0; i < tableau.rows(); ++i) {
    const int b = tableau.basis(i);
    if (b < static_cast<int>(n)) solution.x[static_cast<std::size_t>(b)] = tableau.rhs(i);
    solution.basis.push_back(b);
  }
  if (!problem.lower_bounds.empty()) {
    for (std::size_t j = 0; j < n; ++j) solution.x[j] += problem.lower_bounds[j];
  }
  double value = 0.0;
  for (std::size_t j = 0; j < n; ++j) value += problem.objective[j] * solution.x[j];
  solution.objective = value;

  // Certify primal feasibility before reporting Optimal.
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += problem.constraint_matrix[i * n + j] * solution.x[j];
    if (std::abs(s - problem.rhs[i]) > options.feasibility_tol)
      throw Error("simplex produced an infeasible optimum (residual " +
                  std::to_string(std::abs(s - problem.rhs[i])) + ")");
  }
  const double bound_slack = 1e-10;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = problem.lower_bounds.empty() ? 0.0 : problem.lower_bounds[j];
    if (solution.x[j] < lo - bound_slack)
      throw Error("simplex violated a variable bound");
  }
  return solution;
}

}  // namespace cymono::lp
