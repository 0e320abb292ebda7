#include "cymono/envelope/envelope.hpp"

#include <cmath>
#include <string>

namespace cymono::envelope {

EnvelopeResult lower_convex_envelope(std::span<const double> points_flat, int dimension,
                                     std::span<const double> values,
                                     std::span<const double> query,
                                     const lp::LPOptions& lp_options) {
  if (dimension < 1) throw InvalidInputError("envelope dimension must be >= 1");
  const std::size_t n = values.size();
  if (n == 0 || points_flat.size() != n * static_cast<std::size_t>(dimension))
    throw InvalidInputError("envelope samples are not an n x d block");
  if (query.size() != static_cast<std::size_t>(dimension))
    throw InvalidInputError("query dimension mismatch");

  // min sum lambda_k v_k  s.t.  sum lambda_k x_k = q, sum lambda_k = 1.
  lp::LinearProgram program;
  program.objective.assign(values.begin(), values.end());
  const std::size_t rows = static_cast<std::size_t>(dimension) + 1;
  program.constraint_matrix.assign(rows * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (int c = 0; c < dimension; ++c)
      program.constraint_matrix[static_cast<std::size_t>(c) * n + k] =
          points_flat[k * static_cast<std::size_t>(dimension) + static_cast<std::size_t>(c)];
    program.constraint_matrix[static_cast<std::size_t>(dimension) * n + k] = 1.0;
  }
  program.rhs.assign(query.begin(), query.end());
  program.rhs.push_back(1.0);

  const lp::LPSolution solution = lp::lp_solve(program, lp_options);
  if (solution.status == lp::LPStatus::Infeasible)
    throw InfeasibleError("query lies outside the convex hull of the sample points");
  if (solution.status != lp::LPStatus::Optimal)
    throw Error("envelope LP did not reach an optimum");

  EnvelopeResult out;
  out.value = solution.objective;
  out.coefficients = solution.x;
  for (std::size_t k = 0; k < n; ++k)
    if (solution.x[k] > 0.0) out.support.push_back(static_cast<Index>(k));
  return out;
}

namespace {

// One envelope evaluation against a fixed sample set, batched over
// queries that are themselves sample points.
double envelope_value(std::span<const double> points_flat, int dimension,
                      std::span<const double> values, std::span<const double> query,
                      const lp::LPOptions& lp_options) {
  return lower_convex_envelope(points_flat, dimension, values, query, lp_options).value;
}

}  // namespace

GridHamiltonian convexify_block(const DiscreteDomain& domain, const GridHamiltonian& h,
                                Block block, EnvelopeSign sign,
                                const EnvelopeOptions& options) {
  const int order = h.order();
  const Index m = h.m();
  if (domain.size() != m) throw InvalidInputError("tensor does not match the domain");
  const Rank size = core::checked_tensor_size(m, order, options.tensor_cap);
  const Rank tail = h.tail();
  const int d = domain.dimension();
  const double sgn = sign == EnvelopeSign::Convexify ? 1.0 : -1.0;

  std::vector<double> out(static_cast<std::size_t>(size));

  if (block == Block::First) {
    // One value vector per tail, then m single-point envelopes against it.
    core::fill_indexed(tail, options.policy, [&](Rank t) {
      thread_local std::vector<double> column;
      column.resize(static_cast<std::size_t>(m));
      for (Index k = 0; k < m; ++k)
        column[static_cast<std::size_t>(k)] = sgn * h[k * tail + t];
      for (Index q = 0; q < m; ++q) {
        const double value = envelope_value(domain.points_flat(), d, column,
                                            domain.point(q), options.lp);
        out[static_cast<std::size_t>(q * tail + t)] = sgn * value;
      }
    });
  } else {
    // Joint envelope over the concatenated tail coordinates, one LP per
    // grid tuple.
    const int joint_dim = (order - 1) * d;
    std::vector<double> tail_points(static_cast<std::size_t>(tail) *
                                    static_cast<std::size_t>(joint_dim));
    std::vector<Index> tuple(static_cast<std::size_t>(order - 1));
    for (Rank t = 0; t < tail; ++t) {
      core::unrank_tuple(t, m, order - 1, tuple);
      for (int slot = 0; slot < order - 1; ++slot) {
        const std::span<const double> x = domain.point(tuple[static_cast<std::size_t>(slot)]);
        for (int c = 0; c < d; ++c)
          tail_points[static_cast<std::size_t>(t * joint_dim + slot * d + c)] = x[static_cast<std::size_t>(c)];
      }
    }
    std::vector<double> column(static_cast<std::size_t>(tail));
    for (Index i = 0; i < m; ++i) {
      for (Rank t = 0; t < tail; ++t)
        column[static_cast<std::size_t>(t)] = sgn * h[i * tail + t];
      core::fill_indexed(tail, options.policy, [&](Rank q) {
        const std::span<const double> query{
            tail_points.data() + q * joint_dim, static_cast<std::size_t>(joint_dim)};
        const double value =
            envelope_value(tail_points, joint_dim, column, query, options.lp);
        out[static_cast<std::size_t>(i * tail + q)] = sgn * value;
      });
    }
  }

  return GridHamiltonian(order, m, std::move(out), {}, {}, options.policy);
}

}  // namespace cymono::envelope
