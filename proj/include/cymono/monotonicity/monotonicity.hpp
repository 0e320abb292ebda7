#pragma once

#include <optional>
#include <string>

#include "cymono/core/domain.hpp"
#include "cymono/core/kernels.hpp"

namespace cymono::monotonicity {

using core::DiscreteDomain;
using core::ExecPolicy;
using core::FieldTuple;
using core::Index;
using core::IndexCycle;
using core::Rank;

enum class CycleKind { Single, Joint, Step };

std::string kind_label(CycleKind kind, int step);

// A violating cycle: defect < -tolerance, and recomputing the defect from
// the stored cycle reproduces `defect` exactly.
struct CycleWitness {
  IndexCycle cycle;
  double defect;
  CycleKind kind;
  int step = 1;
};

struct CheckOutcome {
  bool pass;
  std::optional<CycleWitness> witness;
  double min_defect;  // minimum defect seen by the deciding scan
};

struct CheckOptions {
  double tolerance = 1e-9;
  Rank tuple_cap = core::kDefaultTensorCap;
  ExecPolicy policy = ExecPolicy::Parallel;
};

// Full joint defect of Definition 1, summed in fixed (i, l) lexicographic
// order: sum_i sum_l <u_l(x_i), x_i - x_{i+l}> with modular indexing.
double cycle_defect(const DiscreteDomain& domain, const FieldTuple& fields,
                    const IndexCycle& cycle);

// Single-field step-l defect: sum_i <u(x_i), x_i - x_{i+l}>.
double single_cycle_defect(const DiscreteDomain& domain, std::span<const double> field,
                           const IndexCycle& cycle, int step);

// Joint N-monotonicity over every index N-tuple (repetitions allowed).
// The witness is the lexicographically first tuple attaining the minimum
// defect.
CheckOutcome check_joint(const DiscreteDomain& domain, const FieldTuple& fields,
                         const CheckOptions& options = {});

enum class SingleMethod { Enumerate, NegativeCycle };

// N-cyclic monotonicity of one field. Enumerate scans all tuples;
// NegativeCycle runs the depth-limited shortest-closed-walk dynamic
// program on the cost graph c(i->j) = <u(x_i), x_i - x_j>.
CheckOutcome check_single(const DiscreteDomain& domain, std::span<const double> field,
                          int order, SingleMethod method, const CheckOptions& options = {});

// (N, l)-monotonicity of one field, 1 <= l <= N-1.
CheckOutcome check_step(const DiscreteDomain& domain, std::span<const double> field,
                        int order, int step, const CheckOptions& options = {});

// Rockafellar direction: no negative cycle in the cost graph certifies
// N-cyclic monotonicity for every N on the sample.
CheckOutcome check_all_orders(const DiscreteDomain& domain, std::span<const double> field,
                              const CheckOptions& options = {});

}  // namespace cymono::monotonicity
