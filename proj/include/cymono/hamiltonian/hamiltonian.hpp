#pragma once

#include <optional>
#include <vector>

#include "cymono/core/tensor.hpp"
#include "cymono/envelope/envelope.hpp"

namespace cymono::hamiltonian {

using core::DiscreteDomain;
using core::ExecPolicy;
using core::FieldTuple;
using core::GridHamiltonian;
using core::Index;
using core::Rank;
using envelope::EnvelopeOptions;

struct BuildOptions {
  Rank tensor_cap = core::kDefaultTensorCap;
  ExecPolicy policy = ExecPolicy::Parallel;
  lp::LPOptions lp;

  EnvelopeOptions envelope() const { return EnvelopeOptions{tensor_cap, policy, lp}; }
};

// f(x1,...,xN) = sum_l <u_l(x1), x1 - x_{l+1}>; linear in each tail slot,
// exactly zero on the diagonal.
GridHamiltonian build_cost_f(const DiscreteDomain& domain, const FieldTuple& fields,
                             const BuildOptions& options = {});

struct PsiReport {
  double convex_first_idempotence = 0.0;   // |env_first(ftilde) - ftilde|_inf
  double concave_tail_idempotence = 0.0;   // |conc_tail(ftilde) - ftilde|_inf
  double min_psi_plus_f = 0.0;             // min of psi + f, must be >= -tol
  double max_rotation_sum = 0.0;           // max_t sum_k psi(sigma^k t)
  double max_abs_diagonal = 0.0;
  bool properties_hold = false;
};

struct PsiResult {
  GridHamiltonian psi;
  PsiReport report;
};

// psi = -convexification of f in the first variable. For a jointly
// monotone input every property must hold (internal error otherwise);
// for other inputs failures are reported, not raised.
PsiResult build_psi(const DiscreteDomain& domain, const FieldTuple& fields,
                    double tol = 1e-9, const BuildOptions& options = {});

// One monotone improvement: K = -sum_{k>=1} H o sigma^k, then
// H' = ((N-1) H + env_tail(K)) / N.
GridHamiltonian improve_step(const DiscreteDomain& domain, const GridHamiltonian& h,
                             const BuildOptions& options = {});

struct RepresentationReport {
  // min over tails of H(i, y) - sum_l <u_l(x_i), y_l - x_i>, per point i.
  std::vector<double> subgradient_residuals;
  std::vector<double> diagonal_values;
  // |L_H(x_i, u(x_i)) - sum_l <u_l(x_i), x_i>| per point i.
  std::vector<double> dualrep_residuals;
  double max_rotation_sum = 0.0;
  double lower_bound_margin = 0.0;  // min of H - lower sandwich bound
  double upper_bound_margin = 0.0;  // min of upper sandwich bound - H
  double fixed_point_residual = 0.0;
  int iterations = 0;
  // bar-H chain: max(L_barH - L_H) and min(L_barH - sum<u_l(x), x>).
  double barh_le_residual = 0.0;
  double barh_lower_margin = 0.0;
  // Central differences vs fields on regular 1-d grids (empty otherwise);
  // compared at tolerance 10*h.
  std::vector<double> finite_difference_residuals;
  double tolerance = 0.0;
  bool pass = false;
};

struct MaximalResult {
  GridHamiltonian h;
  RepresentationReport report;
};

// Monotone fixed-point iteration H_0 = psi, H_{k+1} = improve_step(H_k),
// stopping when the sup-norm change drops below tol. Requires a jointly
// monotone input. Each step asserts H_{k+1} >= H_k and the upper sandwich
// bound.
MaximalResult build_maximal_H(const DiscreteDomain& domain, const FieldTuple& fields,
                              double tol = 1e-9, int max_iter = 200,
                              const BuildOptions& options = {});

// bar-H = ((N-1) H - sum_{k>=1} H o sigma^k) / N; exactly N-antisymmetric.
GridHamiltonian antisymmetrize(const GridHamiltonian& h, const BuildOptions& options = {});

struct LegendreResult {
  double value;
  std::vector<Index> argmax;  // lexicographically smallest attaining tail
};

// L_H(x, p) = sup over grid tails of sum_l <p_l, y_l> - H(x, y).
LegendreResult legendre_transform(const GridHamiltonian& h, const DiscreteDomain& domain,
                                  Index x_index, std::span<const double> p,
                                  ExecPolicy policy = ExecPolicy::Parallel);

// Checks L_H(x_i, u_1(x_i), ..., u_{N-1}(x_i)) = sum_l <u_l(x_i), x_i> at
// every sample point, plus the bar-H inequality chain when bar_h is given.
RepresentationReport verify_dualrep(const DiscreteDomain& domain, const FieldTuple& fields,
                                    const GridHamiltonian& h, const GridHamiltonian* bar_h,
                                    double tol = 1e-8,
                                    ExecPolicy policy = ExecPolicy::Parallel);

struct TwoVarReport {
  double max_abs_diagonal = 0.0;
  double max_cycle_sum = 0.0;        // max over N-tuples of sum_i F(t_i, t_{i+1})
  double lower_sandwich_margin = 0.0;  // min of F(x,y) - <u(x), y-x>
  double upper_sandwich_margin = 0.0;  // min of <u(y), y-x> - F(x,y)
  double tolerance = 0.0;
  bool pass = false;
};

struct TwoVarResult {
  GridHamiltonian f;  // order-2 tensor F
  TwoVarReport report;
};

// Two-variable concave-convex F with F = -(envelope of <u(x), x-y> in x).
// Requires the field to be N-cyclically monotone on the sample.
TwoVarResult build_two_var_F(const DiscreteDomain& domain, std::span<const double> field,
                             int order, double tol = 1e-8, const BuildOptions& options = {});

enum class LiftVariant { Printed, Corrected };

struct LiftReport {
  double max_abs_rotation_sum = 0.0;
  // max |rotation_sum(t) - (1/N) sum_cyclic F(t_i, t_{i+1})|; the printed
  // variant satisfies this identity, the corrected one has zero sums.
  double printed_identity_residual = 0.0;
  double min_h_minus_f = 0.0;
  bool exact_antisymmetric = false;
  bool h_dominates_f = false;
};

struct LiftResult {
  GridHamiltonian h;
  LiftReport report;
};

// Lift of a two-variable F to N variables:
//   Printed:   H = ((N-1) F(t1,t2) - sum_{i=2}^{N-1} F(t_i,t_{i+1})) / N
//   Corrected: the subtracted sum runs i = 1..N-1.
// Both variants are built and reported; F must vanish on the diagonal.
LiftResult lift_F_to_H(const GridHamiltonian& f, int order, LiftVariant variant,
                       const BuildOptions& options = {});

}  // namespace cymono::hamiltonian
