#pragma once

#include <span>
#include <vector>

#include "cymono/core/tensor.hpp"
#include "cymono/lp/simplex.hpp"

namespace cymono::envelope {

using core::DiscreteDomain;
using core::ExecPolicy;
using core::GridHamiltonian;
using core::Index;
using core::Rank;

// Value of the lower convex envelope at a query point together with the
// barycentric weights of an optimal representation.
struct EnvelopeResult {
  double value;
  std::vector<double> coefficients;  // lambda_k over all sample points
  std::vector<Index> support;        // indices with lambda_k > 0
};

// inf { sum lambda_k values[k] : lambda >= 0, sum lambda = 1,
//       sum lambda_k points[k] = query }, solved as an LP.
// Throws InfeasibleError when the query lies outside the convex hull.
EnvelopeResult lower_convex_envelope(std::span<const double> points_flat, int dimension,
                                     std::span<const double> values,
                                     std::span<const double> query,
                                     const lp::LPOptions& lp_options = {});

enum class Block { First, Tail };
enum class EnvelopeSign { Convexify, Concavify };

struct EnvelopeOptions {
  Rank tensor_cap = core::kDefaultTensorCap;
  ExecPolicy policy = ExecPolicy::Parallel;
  lp::LPOptions lp;
};

// Blockwise envelope of a grid function, evaluated at every grid point.
// Block::First convexifies in x1 for each fixed tail; Block::Tail takes
// the joint envelope in the concatenated last (N-1) variables for each
// fixed x1. Concavify negates, convexifies, negates.
GridHamiltonian convexify_block(const DiscreteDomain& domain, const GridHamiltonian& h,
                                Block block, EnvelopeSign sign,
                                const EnvelopeOptions& options = {});

}  // namespace cymono::envelope
