#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cymono/core/involution.hpp"
#include "cymono/core/tensor.hpp"
#include "cymono/lp/simplex.hpp"
#include "cymono/monotonicity/monotonicity.hpp"

namespace cymono::transport {

using core::DiscreteDomain;
using core::ExecPolicy;
using core::FieldTuple;
using core::GridHamiltonian;
using core::Index;
using core::NInvolution;
using core::Rank;
using core::SigmaCoupling;
using monotonicity::CycleWitness;

struct TransportOptions {
  Rank tensor_cap = core::kDefaultTensorCap;
  ExecPolicy policy = ExecPolicy::Parallel;
  lp::LPOptions lp;
};

struct TransportResult {
  double value;
  SigmaCoupling coupling;
  int orbit_count;
  int lp_rows;
};

// sigma-invariant Monge-Kantorovich LP: minimize <cost_f, pi> over
// couplings with first marginal mu. Variables are aggregated by
// sigma-orbit (one variable per orbit, orbit-averaged cost) and the full
// tensor is reconstructed from the orbit masses.
TransportResult solve_sigma_kantorovich(const DiscreteDomain& domain, const FieldTuple& fields,
                                        const TransportOptions& options = {});

// Push-forward of mu by x -> (x, x, ..., x).
SigmaCoupling diagonal_coupling(const DiscreteDomain& domain, int order);

// Push-forward of mu by x -> (x, Sx, ..., S^{N-1}x). The coupling
// invariants are checked, not assumed. Non-uniform weights are accepted
// only when mu is constant along the orbits of S.
SigmaCoupling pushforward_coupling(const NInvolution& s, const DiscreteDomain& domain);

// Which of the three equivalent graph-coupling conditions hold for an
// arbitrary map of domain indices (not necessarily a bijection).
struct GraphLemmaReport {
  bool pushforward_sigma_invariant = false;   // condition 1
  bool measure_preserving_involution = false; // condition 2
  bool antisymmetric_integrals_vanish = false;  // condition 3
  double max_indicator_residual = 0.0;  // test family f(x1) - f(x_i)
  double abs_value_integral = 0.0;      // = integral of |x - S^N x| d mu
  double max_basket_integral = 0.0;     // random antisymmetric Hamiltonians
};

GraphLemmaReport verify_graph_lemma(std::span<const Index> map, const DiscreteDomain& domain,
                                    int order, std::uint64_t seed = 0,
                                    int basket_size = 8);

enum class InvolutionMethod { Exact, Local };

struct InvolutionOptions {
  Index factorial_cap = 8;  // Exact enumerates permutations of at most this many points
  int restarts = 20;
  std::uint64_t seed = 0;
  ExecPolicy policy = ExecPolicy::Parallel;
};

struct InvolutionResult {
  double value;
  NInvolution s;
  InvolutionMethod method;
  bool optimal;  // certified only by the exact method
};

// The polar pairing sum_l sum_i mu_i <u_l(x_i), x_i - x_{S^l(i)}>.
double involution_objective(const DiscreteDomain& domain, const FieldTuple& fields,
                            const NInvolution& s);

// Minimize the polar pairing over permutations S with S^N = identity.
// Exact enumerates; Local runs seeded steepest descent over cycle-splice
// moves with restarts. Ties are broken toward the lexicographically
// smallest permutation. Uniform weights required.
InvolutionResult solve_involution_polar(const DiscreteDomain& domain, const FieldTuple& fields,
                                        InvolutionMethod method,
                                        const InvolutionOptions& options = {});

// sum_l sum_i mu_i |u_l(x_i) - x_{S^l(i)}|^2. Uniform weights required.
double projection_objective(const DiscreteDomain& domain, const FieldTuple& fields,
                            const NInvolution& s);

// |direct - expanded| for the developed-square identity; test hook.
double projection_expand_identity_residual(const DiscreteDomain& domain,
                                           const FieldTuple& fields, const NInvolution& s);

// int L_H(x, u(x)) dmu - sum_l int <u_l(x), S^l x> dmu. Requires the
// antisymmetric flag on H and uniform weights; weak duality makes this
// >= 0 up to roundoff for every N-involution S.
double duality_gap(const DiscreteDomain& domain, const FieldTuple& fields,
                   const GridHamiltonian& h, const NInvolution& s,
                   ExecPolicy policy = ExecPolicy::Parallel);

// For a strictly negative transport optimum, a support orbit whose cycle
// re-evaluates to a negative defect.
std::optional<CycleWitness> extract_violation(const DiscreteDomain& domain,
                                              const FieldTuple& fields,
                                              const TransportResult& result,
                                              double tolerance = 1e-9);

}  // namespace cymono::transport
