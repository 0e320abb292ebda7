#include "cymono/hamiltonian/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cymono/monotonicity/monotonicity.hpp"

namespace cymono::hamiltonian {

namespace {

using core::diagonal_rank;
using core::sigma_rank;
using core::unrank_tuple;

// The represented class has an exactly zero diagonal; values inside the
// tolerance are canonicalized, anything larger is an error.
void snap_diagonal(std::vector<double>& values, Index m, int order, double tol,
                   const char* what) {
  for (Index i = 0; i < m; ++i) {
    double& v = values[static_cast<std::size_t>(diagonal_rank(i, m, order))];
    if (std::abs(v) > tol)
      throw Error(std::string(what) + ": diagonal entry " + std::to_string(v) +
                  " at i=" + std::to_string(i) + " exceeds tolerance");
    v = 0.0;
  }
}

double max_abs_difference(const GridHamiltonian& a, const GridHamiltonian& b,
                          ExecPolicy policy) {
  return core::scan_max_value(a.size(), policy,
                              [&](Rank r) { return std::abs(a[r] - b[r]); });
}

double min_difference(const GridHamiltonian& a, const GridHamiltonian& b, ExecPolicy policy) {
  return -core::scan_max_value(a.size(), policy, [&](Rank r) { return b[r] - a[r]; });
}

}  // namespace

GridHamiltonian build_cost_f(const DiscreteDomain& domain, const FieldTuple& fields,
                             const BuildOptions& options) {
  fields.require_compatible(domain);
  const int n = fields.order();
  const Index m = domain.size();
  const Rank size = core::checked_tensor_size(m, n, options.tensor_cap);
  std::vector<double> values(static_cast<std::size_t>(size));
  core::fill_indexed(size, options.policy, [&](Rank r) {
    thread_local std::vector<Index> tuple;
    tuple.resize(static_cast<std::size_t>(n));
    unrank_tuple(r, m, n, tuple);
    const Index x1 = tuple[0];
    double s = 0.0;
    for (int l = 1; l < n; ++l)
      s += core::dot_diff(fields.value(l - 1, x1), domain.point(x1),
                          domain.point(tuple[static_cast<std::size_t>(l)]));
    values[static_cast<std::size_t>(r)] = s;
  });
  return GridHamiltonian(n, m, std::move(values), {.diagonal_zero = true}, {}, options.policy);
}

PsiResult build_psi(const DiscreteDomain& domain, const FieldTuple& fields, double tol,
                    const BuildOptions& options) {
  const GridHamiltonian f = build_cost_f(domain, fields, options);
  const GridHamiltonian ftilde =
      envelope::convexify_block(domain, f, envelope::Block::First,
                                envelope::EnvelopeSign::Convexify, options.envelope());

  PsiReport report;
  {
    const GridHamiltonian again =
        envelope::convexify_block(domain, ftilde, envelope::Block::First,
                                  envelope::EnvelopeSign::Convexify, options.envelope());
    report.convex_first_idempotence = max_abs_difference(again, ftilde, options.policy);
  }
  {
    const GridHamiltonian conc =
        envelope::convexify_block(domain, ftilde, envelope::Block::Tail,
                                  envelope::EnvelopeSign::Concavify, options.envelope());
    report.concave_tail_idempotence = max_abs_difference(conc, ftilde, options.policy);
  }
  // psi >= -f is exactly f >= ftilde.
  report.min_psi_plus_f = min_difference(f, ftilde, options.policy);
  // rotation sums of psi are the negated rotation sums of ftilde.
  report.max_rotation_sum = core::scan_max_value(
      ftilde.size(), options.policy, [&](Rank r) { return -ftilde.rotation_sum(r); });
  report.max_abs_diagonal = core::max_abs_diagonal(ftilde);

  report.properties_hold = report.convex_first_idempotence <= tol &&
                           report.concave_tail_idempotence <= tol &&
                           report.min_psi_plus_f >= -tol && report.max_rotation_sum <= tol &&
                           report.max_abs_diagonal <= tol;

  const bool monotone = monotonicity::check_joint(domain, fields,
                                                  {tol, options.tensor_cap, options.policy})
                            .pass;
  if (monotone && !report.properties_hold)
    throw Error("psi properties failed on a jointly monotone input");

  std::vector<double> psi_values(ftilde.values().begin(), ftilde.values().end());
  for (double& v : psi_values) v = -v;
  core::HamiltonianFlags flags;
  if (report.max_abs_diagonal <= tol) {
    snap_diagonal(psi_values, domain.size(), fields.order(), tol, "build_psi");
    flags.diagonal_zero = true;
  }
  flags.sub_antisymmetric = report.max_rotation_sum <= tol;
  core::FlagTolerances ftol;
  ftol.sub_antisymmetric = std::max(tol, ftol.sub_antisymmetric);
  return PsiResult{GridHamiltonian(fields.order(), domain.size(), std::move(psi_values), flags,
                                   ftol, options.policy),
                   report};
}

GridHamiltonian improve_step(const DiscreteDomain& domain, const GridHamiltonian& h,
                             const BuildOptions& options) {
  const int n = h.order();
  const Index m = h.m();
  const Rank size = h.size();

  // K = -sum_{k=1}^{N-1} H o sigma^k = H - (rotation sum).
  std::vector<double> k_values(static_cast<std::size_t>(size));
  core::fill_indexed(size, options.policy, [&](Rank r) {
    k_values[static_cast<std::size_t>(r)] = h[r] - h.rotation_sum(r);
  });
  const GridHamiltonian k(n, m, std::move(k_values), {}, {}, options.policy);
  const GridHamiltonian k_tail =
      envelope::convexify_block(domain, k, envelope::Block::Tail,
                                envelope::EnvelopeSign::Convexify, options.envelope());

  std::vector<double> improved(static_cast<std::size_t>(size));
  const double scale = 1.0 / static_cast<double>(n);
  core::fill_indexed(size, options.policy, [&](Rank r) {
    improved[static_cast<std::size_t>(r)] =
        (static_cast<double>(n - 1) * h[r] + k_tail[r]) * scale;
  });
  snap_diagonal(improved, m, n, 1e-8, "improve_step");
  return GridHamiltonian(n, m, std::move(improved), {.diagonal_zero = true}, {},
                         options.policy);
}

MaximalResult build_maximal_H(const DiscreteDomain& domain, const FieldTuple& fields,
                              double tol, int max_iter, const BuildOptions& options) {
  fields.require_compatible(domain);
  const monotonicity::CheckOutcome joint =
      monotonicity::check_joint(domain, fields, {tol, options.tensor_cap, options.policy});
  if (!joint.pass)
    throw NotMonotoneError("fields are not jointly monotone (defect " +
                           std::to_string(joint.min_defect) + ")");

  const GridHamiltonian f = build_cost_f(domain, fields, options);
  const int n = f.order();
  const Index m = f.m();
  // Upper sandwich bound sum_{i>=2} sum_l <u_l(x_i), x_i - x_{i+l}>, i.e.
  // the full cycle defect minus the first-vertex cost.
  std::vector<double> upper(static_cast<std::size_t>(f.size()));
  core::fill_indexed(f.size(), options.policy, [&](Rank r) {
    upper[static_cast<std::size_t>(r)] = f.rotation_sum(r) - f[r];
  });

  PsiResult psi = build_psi(domain, fields, tol, options);
  GridHamiltonian h = std::move(psi.psi);

  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  for (int it = 1; it <= max_iter; ++it) {
    GridHamiltonian next = improve_step(domain, h, options);
    const double decrease = min_difference(next, h, options.policy);
    if (decrease < -1e-9)
      throw Error("monotone iteration decreased by " + std::to_string(-decrease));
    const double above = core::scan_max_value(next.size(), options.policy, [&](Rank r) {
      return next[r] - upper[static_cast<std::size_t>(r)];
    });
    if (above > 1e-8)
      throw Error("iterate exceeded the upper sandwich bound by " + std::to_string(above));
    residual = max_abs_difference(next, h, options.policy);
    h = std::move(next);
    iterations = it;
    if (residual < tol) {
      converged = true;
      break;
    }
  }
  if (!converged && max_iter > 0)
    throw ConvergenceError("fixed-point iteration stopped after " +
                           std::to_string(iterations) + " steps with residual " +
                           std::to_string(residual));

  // Final flags, verified by the constructor scans.
  core::HamiltonianFlags flags{.diagonal_zero = true, .sub_antisymmetric = true};
  core::FlagTolerances ftol;
  ftol.sub_antisymmetric = std::max(ftol.sub_antisymmetric, tol);
  GridHamiltonian certified(n, m, std::vector<double>(h.values().begin(), h.values().end()),
                            flags, ftol, options.policy);

  RepresentationReport report;
  report.tolerance = std::max(tol, 1e-8);
  report.fixed_point_residual = residual;
  report.iterations = iterations;
  report.max_rotation_sum = core::max_rotation_sum(certified, options.policy);
  report.lower_bound_margin = core::scan_min(certified.size(), options.policy, [&](Rank r) {
                                return certified[r] + f[r];
                              }).value;
  report.upper_bound_margin = core::scan_min(certified.size(), options.policy, [&](Rank r) {
                                return upper[static_cast<std::size_t>(r)] - certified[r];
                              }).value;

  const Rank tail = certified.tail();
  for (Index i = 0; i < m; ++i) {
    report.diagonal_values.push_back(certified[diagonal_rank(i, m, n)]);
    // min over tails of H(i, y) - sum_l <u_l(x_i), y_l - x_i>.
    const double margin = core::scan_min(tail, options.policy, [&](Rank t) {
                            thread_local std::vector<Index> y;
                            y.resize(static_cast<std::size_t>(n - 1));
                            unrank_tuple(t, m, n - 1, y);
                            double plane = 0.0;
                            for (int l = 1; l < n; ++l)
                              plane += core::dot_diff(fields.value(l - 1, i),
                                                      domain.point(y[static_cast<std::size_t>(l - 1)]),
                                                      domain.point(i));
                            return certified[i * tail + t] - plane;
                          }).value;
    report.subgradient_residuals.push_back(margin);
  }

  const RepresentationReport dual =
      verify_dualrep(domain, fields, certified, nullptr, report.tolerance, options.policy);
  report.dualrep_residuals = dual.dualrep_residuals;

  // Central-difference comparison on regular 1-d grids, tolerance 10 h.
  double spacing = 0.0;
  bool fd_ok = true;
  if (domain.regular_grid_1d(&spacing)) {
    for (Index i = 1; i + 1 < m; ++i) {
      for (int l = 1; l < n; ++l) {
        std::vector<Index> plus(static_cast<std::size_t>(n), i);
        std::vector<Index> minus(static_cast<std::size_t>(n), i);
        plus[static_cast<std::size_t>(l)] = i + 1;
        minus[static_cast<std::size_t>(l)] = i - 1;
        const double cd = (certified.at(plus) - certified.at(minus)) / (2.0 * spacing);
        const double res = std::abs(cd - fields.value(l - 1, i)[0]);
        report.finite_difference_residuals.push_back(res);
        if (res > 10.0 * spacing) fd_ok = false;
      }
    }
  }

  bool ok = report.max_rotation_sum <= report.tolerance &&
            report.lower_bound_margin >= -report.tolerance &&
            report.upper_bound_margin >= -report.tolerance && fd_ok;
  for (const double v : report.diagonal_values)
    if (v != 0.0) ok = false;
  for (const double v : report.subgradient_residuals)
    if (v < -report.tolerance) ok = false;
  for (const double v : report.dualrep_residuals)
    if (v > report.tolerance) ok = false;
  report.pass = ok;

  return MaximalResult{std::move(certified), std::move(report)};
}

GridHamiltonian antisymmetrize(const GridHamiltonian& h, const BuildOptions& options) {
  const int n = h.order();
  const Index m = h.m();
  std::vector<double> values(static_cast<std::size_t>(h.size()));
  const double scale = 1.0 / static_cast<double>(n);
  core::fill_indexed(h.size(), options.policy, [&](Rank r) {
    // ((N-1) H - sum_{k>=1} H o sigma^k) / N = (N H - rotation sum) / N.
    values[static_cast<std::size_t>(r)] =
        (static_cast<double>(n) * h[r] - h.rotation_sum(r)) * scale;
  });
  snap_diagonal(values, m, n, 1e-10, "antisymmetrize");
  return GridHamiltonian(n, m, std::move(values),
                         {.diagonal_zero = true, .sub_antisymmetric = true, .antisymmetric = true},
                         {}, options.policy);
}

LegendreResult legendre_transform(const GridHamiltonian& h, const DiscreteDomain& domain,
                                  Index x_index, std::span<const double> p, ExecPolicy policy) {
  const int n = h.order();
  const Index m = h.m();
  const int d = domain.dimension();
  if (domain.size() != m) throw InvalidInputError("tensor does not match the domain");
  if (x_index < 0 || x_index >= m) throw InvalidInputError("x index out of range");
  if (p.size() != static_cast<std::size_t>((n - 1) * d))
    throw InvalidInputError("expected N-1 direction vectors");

  // pair[l*m + j] = <p_l, x_j>.
  std::vector<double> pair(static_cast<std::size_t>((n - 1) * m));
  for (int l = 0; l < n - 1; ++l) {
    const std::span<const double> pl{p.data() + static_cast<std::size_t>(l) * d,
                                     static_cast<std::size_t>(d)};
    for (Index j = 0; j < m; ++j)
      pair[static_cast<std::size_t>(l) * m + static_cast<std::size_t>(j)] =
          core::dot(pl, domain.point(j));
  }

  const Rank tail = h.tail();
  const core::ArgMin best = core::scan_min(tail, policy, [&](Rank t) {
    thread_local std::vector<Index> y;
    y.resize(static_cast<std::size_t>(n - 1));
    unrank_tuple(t, m, n - 1, y);
    double s = 0.0;
    for (int l = 0; l < n - 1; ++l)
      s += pair[static_cast<std::size_t>(l) * m +
                static_cast<std::size_t>(y[static_cast<std::size_t>(l)])];
    return -(s - h[x_index * tail + t]);
  });

  LegendreResult out;
  out.value = -best.value;
  out.argmax.resize(static_cast<std::size_t>(n - 1));
  unrank_tuple(best.index, m, n - 1, out.argmax);
  return out;
}

RepresentationReport verify_dualrep(const DiscreteDomain& domain, const FieldTuple& fields,
                                    const GridHamiltonian& h, const GridHamiltonian* bar_h,
                                    double tol, ExecPolicy policy) {
  fields.require_compatible(domain);
  const int n = fields.order();
  const int d = domain.dimension();
  const Index m = domain.size();
  if (h.order() != n || h.m() != m)
    throw InvalidInputError("Hamiltonian does not match the fields");

  RepresentationReport report;
  report.tolerance = tol;
  report.barh_le_residual = 0.0;
  report.barh_lower_margin = 0.0;
  bool first_bar = true;
  std::vector<double> p(static_cast<std::size_t>((n - 1) * d));
  for (Index i = 0; i < m; ++i) {
    for (int l = 0; l < n - 1; ++l) {
      const std::span<const double> u = fields.value(l, i);
      for (int c = 0; c < d; ++c) p[static_cast<std::size_t>(l * d + c)] = u[static_cast<std::size_t>(c)];
    }
    double expected = 0.0;
    for (int l = 0; l < n - 1; ++l) expected += core::dot(fields.value(l, i), domain.point(i));
    const LegendreResult lh = legendre_transform(h, domain, i, p, policy);
    report.dualrep_residuals.push_back(std::abs(lh.value - expected));
    if (bar_h != nullptr) {
      const LegendreResult lbar = legendre_transform(*bar_h, domain, i, p, policy);
      const double le = lbar.value - lh.value;
      const double lower = lbar.value - expected;
      if (first_bar) {
        report.barh_le_residual = le;
        report.barh_lower_margin = lower;
        first_bar = false;
      } else {
        report.barh_le_residual = std::max(report.barh_le_residual, le);
        report.barh_lower_margin = std::min(report.barh_lower_margin, lower);
      }
    }
  }

  bool ok = true;
  for (const double v : report.dualrep_residuals)
    if (v > tol) ok = false;
  if (bar_h != nullptr && (report.barh_le_residual > tol || report.barh_lower_margin < -tol))
    ok = false;
  report.pass = ok;
  return report;
}

TwoVarResult build_two_var_F(const DiscreteDomain& domain, std::span<const double> field,
                             int order, double tol, const BuildOptions& options) {
  const Index m = domain.size();
  const int d = domain.dimension();
  if (static_cast<Index>(field.size()) != m * d)
    throw InvalidInputError("field size does not match the domain");
  const monotonicity::CheckOutcome mono = monotonicity::check_single(
      domain, field, order, monotonicity::SingleMethod::NegativeCycle,
      {tol, options.tensor_cap, options.policy});
  if (!mono.pass)
    throw NotMonotoneError("field is not " + std::to_string(order) +
                           "-cyclically monotone (defect " + std::to_string(mono.min_defect) +
                           ")");

  // f(x, y) = <u(x), x - y>.
  std::vector<double> f_values(static_cast<std::size_t>(m * m));
  for (Index a = 0; a < m; ++a) {
    const std::span<const double> u{field.data() + a * d, static_cast<std::size_t>(d)};
    for (Index b = 0; b < m; ++b)
      f_values[static_cast<std::size_t>(a * m + b)] =
          core::dot_diff(u, domain.point(a), domain.point(b));
  }
  const GridHamiltonian f2(2, m, std::move(f_values), {.diagonal_zero = true}, {},
                           options.policy);
  const GridHamiltonian f1 =
      envelope::convexify_block(domain, f2, envelope::Block::First,
                                envelope::EnvelopeSign::Convexify, options.envelope());

  std::vector<double> f_cap(static_cast<std::size_t>(m * m));
  for (Rank r = 0; r < f1.size(); ++r) f_cap[static_cast<std::size_t>(r)] = -f1[r];

  TwoVarReport report;
  report.tolerance = tol;
  report.max_abs_diagonal = 0.0;
  for (Index i = 0; i < m; ++i)
    report.max_abs_diagonal =
        std::max(report.max_abs_diagonal,
                 std::abs(f_cap[static_cast<std::size_t>(i * m + i)]));

  core::HamiltonianFlags flags;
  if (report.max_abs_diagonal <= tol) {
    snap_diagonal(f_cap, m, 2, tol, "build_two_var_F");
    flags.diagonal_zero = true;
  }

  // Cyclic sub-antisymmetry over all grid N-cycles.
  const Rank cycles = core::checked_tensor_size(m, order, options.tensor_cap);
  report.max_cycle_sum = core::scan_max_value(cycles, options.policy, [&](Rank r) {
    thread_local std::vector<Index> t;
    t.resize(static_cast<std::size_t>(order));
    unrank_tuple(r, m, order, t);
    double s = 0.0;
    for (int i = 0; i < order; ++i)
      s += f_cap[static_cast<std::size_t>(t[static_cast<std::size_t>(i)] * m +
                                          t[static_cast<std::size_t>((i + 1) % order)])];
    return s;
  });

  // Sandwich <u(x1), x2-x1> <= F(x1,x2) <= <u(x2), x2-x1>.
  report.lower_sandwich_margin = 0.0;
  report.upper_sandwich_margin = 0.0;
  bool first = true;
  for (Index a = 0; a < m; ++a) {
    const std::span<const double> ua{field.data() + a * d, static_cast<std::size_t>(d)};
    for (Index b = 0; b < m; ++b) {
      const std::span<const double> ub{field.data() + b * d, static_cast<std::size_t>(d)};
      const double value = f_cap[static_cast<std::size_t>(a * m + b)];
      const double lo = core::dot_diff(ua, domain.point(b), domain.point(a));
      const double hi = core::dot_diff(ub, domain.point(b), domain.point(a));
      if (first) {
        report.lower_sandwich_margin = value - lo;
        report.upper_sandwich_margin = hi - value;
        first = false;
      } else {
        report.lower_sandwich_margin = std::min(report.lower_sandwich_margin, value - lo);
        report.upper_sandwich_margin = std::min(report.upper_sandwich_margin, hi - value);
      }
    }
  }

  flags.sub_antisymmetric = true;  // pair sums F(x,y)+F(y,x) <= 0; constructor scan verifies
  core::FlagTolerances ftol;
  ftol.sub_antisymmetric = std::max(tol, ftol.sub_antisymmetric);
  report.pass = report.max_abs_diagonal <= tol && report.max_cycle_sum <= tol &&
                report.lower_sandwich_margin >= -tol && report.upper_sandwich_margin >= -tol;
  GridHamiltonian f_out(2, m, std::move(f_cap), flags, ftol, options.policy);
  return TwoVarResult{std::move(f_out), report};
}

LiftResult lift_F_to_H(const GridHamiltonian& f, int order, LiftVariant variant,
                       const BuildOptions& options) {
  if (f.order() != 2) throw InvalidInputError("lift requires an order-2 tensor");
  const Index m = f.m();
  if (core::max_abs_diagonal(f) > 1e-12)
    throw InvalidInputError("lift requires F to vanish on the diagonal");
  if (order < 2) throw InvalidInputError("lift order must be >= 2");
  const Rank size = core::checked_tensor_size(m, order, options.tensor_cap);

  std::vector<double> values(static_cast<std::size_t>(size));
  const double scale = 1.0 / static_cast<double>(order);
  const int sum_from = variant == LiftVariant::Printed ? 1 : 0;
  core::fill_indexed(size, options.policy, [&](Rank r) {
    thread_local std::vector<Index> t;
    t.resize(static_cast<std::size_t>(order));
    unrank_tuple(r, m, order, t);
    double subtracted = 0.0;
    for (int i = sum_from; i <= order - 2; ++i)
      subtracted += f[t[static_cast<std::size_t>(i)] * m + t[static_cast<std::size_t>(i + 1)]];
    values[static_cast<std::size_t>(r)] =
        (static_cast<double>(order - 1) * f[t[0] * m + t[1]] - subtracted) * scale;
  });
  snap_diagonal(values, m, order, 1e-11, "lift_F_to_H");

  const GridHamiltonian probe(order, m, std::move(values), {}, {}, options.policy);

  LiftReport report;
  report.max_abs_rotation_sum = core::max_abs_rotation_sum(probe, options.policy);
  report.printed_identity_residual =
      core::scan_max_value(size, options.policy, [&](Rank r) {
        thread_local std::vector<Index> t;
        t.resize(static_cast<std::size_t>(order));
        unrank_tuple(r, m, order, t);
        double cyclic = 0.0;
        for (int i = 0; i < order; ++i)
          cyclic += f[t[static_cast<std::size_t>(i)] * m +
                      t[static_cast<std::size_t>((i + 1) % order)]];
        return std::abs(probe.rotation_sum(r) - cyclic * scale);
      });
  report.min_h_minus_f = core::scan_min(size, options.policy, [&](Rank r) {
                           thread_local std::vector<Index> t;
                           t.resize(static_cast<std::size_t>(order));
                           unrank_tuple(r, m, order, t);
                           return probe[r] - f[t[0] * m + t[1]];
                         }).value;
  report.exact_antisymmetric = report.max_abs_rotation_sum <= 1e-10;
  report.h_dominates_f = report.min_h_minus_f >= -1e-10;

  core::HamiltonianFlags flags{.diagonal_zero = true};
  if (report.exact_antisymmetric) {
    flags.sub_antisymmetric = true;
    flags.antisymmetric = true;
  }
  GridHamiltonian out(order, m, std::vector<double>(probe.values().begin(), probe.values().end()),
                      flags, {}, options.policy);
  return LiftResult{std::move(out), report};
}

}  // namespace cymono::hamiltonian
