#include "cymono/monotonicity/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cymono::monotonicity {

std::string kind_label(CycleKind kind, int step) {
  switch (kind) {
    case CycleKind::Single:
      return "single";
    case CycleKind::Joint:
      return "joint";
    case CycleKind::Step:
      return "step-" + std::to_string(step);
  }
  return "unknown";
}

double cycle_defect(const DiscreteDomain& domain, const FieldTuple& fields,
                    const IndexCycle& cycle) {
  fields.require_compatible(domain);
  const int n = fields.order();
  if (cycle.order != n) throw InvalidInputError("cycle length does not match field order");
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const Index xi = cycle.at(i);
    for (int l = 1; l < n; ++l) {
      s += core::dot_diff(fields.value(l - 1, xi), domain.point(xi), domain.point(cycle.at(i + l)));
    }
  }
  return s;
}

double single_cycle_defect(const DiscreteDomain& domain, std::span<const double> field,
                           const IndexCycle& cycle, int step) {
  const int n = cycle.order;
  if (step < 1 || step > n - 1) throw InvalidInputError("step must lie in [1, N-1]");
  const int d = domain.dimension();
  if (static_cast<Index>(field.size()) != domain.size() * d)
    throw InvalidInputError("field size does not match the domain");
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const Index xi = cycle.at(i);
    const std::span<const double> u{field.data() + xi * d, static_cast<std::size_t>(d)};
    s += core::dot_diff(u, domain.point(xi), domain.point(cycle.at(i + step)));
  }
  return s;
}

namespace {

struct TupleScan {
  core::ArgMin best;
  std::vector<Index> tuple;
};

// Minimum defect over all m^N tuples with the lexicographically first
// argmin, using the deterministic chunked reduction.
template <typename DefectAt>
TupleScan scan_tuples(Index m, int order, Rank cap, ExecPolicy policy, DefectAt&& defect_at) {
  const Rank size = core::checked_tensor_size(m, order, cap);
  const core::ArgMin best = core::scan_min(size, policy, defect_at);
  TupleScan out{best, std::vector<Index>(static_cast<std::size_t>(order))};
  core::unrank_tuple(best.index, m, order, out.tuple);
  return out;
}

CheckOutcome outcome_from_scan(const DiscreteDomain& domain, const TupleScan& scan,
                               double tolerance, CycleKind kind, int step,
                               double recomputed_defect) {
  CheckOutcome out{true, std::nullopt, scan.best.value};
  if (scan.best.value < -tolerance) {
    out.pass = false;
    out.witness = CycleWitness{
        IndexCycle(static_cast<int>(scan.tuple.size()), scan.tuple, domain.size()),
        recomputed_defect, kind, step};
  }
  return out;
}

// Closed-walk dynamic program: min cost walk with exactly k edges
// returning to its start, over k = 2..depth. Tracks predecessors for
// witness reconstruction. Deterministic: strict improvement, fixed order.
struct WalkResult {
  double min_cost = std::numeric_limits<double>::infinity();
  std::vector<Index> cycle;  // vertices of the best closed walk
};

WalkResult min_closed_walk(const std::vector<double>& cost, Index m, int depth) {
  if (static_cast<Rank>(depth) * m * m > 200'000'000)
    throw CapExceededError("closed-walk table would exceed the memory guard");
  // walk[i*m+j]: min cost over walks i -> j with k edges.
  std::vector<double> walk(cost);
  std::vector<std::vector<Index>> pred(static_cast<std::size_t>(depth) + 1);
  WalkResult best;
  int best_len = 0;
  Index best_start = 0;

  for (int k = 2; k <= depth; ++k) {
    std::vector<double> next(static_cast<std::size_t>(m * m));
    std::vector<Index>& p = pred[static_cast<std::size_t>(k)];
    p.assign(static_cast<std::size_t>(m * m), 0);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) {
        double bestv = std::numeric_limits<double>::infinity();
        Index besth = 0;
        for (Index h = 0; h < m; ++h) {
          const double v = walk[static_cast<std::size_t>(i * m + h)] +
                           cost[static_cast<std::size_t>(h * m + j)];
          if (v < bestv) {
            bestv = v;
            besth = h;
          }
        }
        next[static_cast<std::size_t>(i * m + j)] = bestv;
        p[static_cast<std::size_t>(i * m + j)] = besth;
      }
    }
    walk.swap(next);
    for (Index i = 0; i < m; ++i) {
      const double v = walk[static_cast<std::size_t>(i * m + i)];
      if (v < best.min_cost) {
        best.min_cost = v;
        best_len = k;
        best_start = i;
      }
    }
  }
  if (best_len == 0) return best;

  // Reconstruct backwards through the predecessor tables.
  std::vector<Index> rev;
  Index cur = best_start;
  for (int k = best_len; k >= 2; --k) {
    rev.push_back(cur);
    cur = pred[static_cast<std::size_t>(k)][static_cast<std::size_t>(best_start * m + cur)];
  }
  rev.push_back(cur);
  std::reverse(rev.begin(), rev.end());
  // rev = (start, ..., last); the closing edge back to start is implicit.
  best.cycle = std::move(rev);
  return best;
}

std::vector<double> cost_graph(const DiscreteDomain& domain, std::span<const double> field) {
  const Index m = domain.size();
  const int d = domain.dimension();
  std::vector<double> cost(static_cast<std::size_t>(m * m));
  for (Index i = 0; i < m; ++i) {
    const std::span<const double> u{field.data() + i * d, static_cast<std::size_t>(d)};
    for (Index j = 0; j < m; ++j)
      cost[static_cast<std::size_t>(i * m + j)] =
          core::dot_diff(u, domain.point(i), domain.point(j));
  }
  return cost;
}

}  // namespace

CheckOutcome check_joint(const DiscreteDomain& domain, const FieldTuple& fields,
                         const CheckOptions& options) {
  fields.require_compatible(domain);
  const int n = fields.order();
  const Index m = domain.size();
  auto defect_at = [&](Rank r) {
    thread_local std::vector<Index> tuple;
    tuple.resize(static_cast<std::size_t>(n));
    core::unrank_tuple(r, m, n, tuple);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const Index xi = tuple[static_cast<std::size_t>(i)];
      for (int l = 1; l < n; ++l) {
        const Index xj = tuple[static_cast<std::size_t>((i + l) % n)];
        s += core::dot_diff(fields.value(l - 1, xi), domain.point(xi), domain.point(xj));
      }
    }
    return s;
  };
  const TupleScan scan = scan_tuples(m, n, options.tuple_cap, options.policy, defect_at);
  const IndexCycle cycle(n, scan.tuple, m);
  return outcome_from_scan(domain, scan, options.tolerance, CycleKind::Joint, 1,
                           cycle_defect(domain, fields, cycle));
}

CheckOutcome check_step(const DiscreteDomain& domain, std::span<const double> field,
                        int order, int step, const CheckOptions& options) {
  if (step < 1 || step > order - 1) throw InvalidInputError("step must lie in [1, N-1]");
  const Index m = domain.size();
  const int d = domain.dimension();
  if (static_cast<Index>(field.size()) != m * d)
    throw InvalidInputError("field size does not match the domain");
  auto defect_at = [&](Rank r) {
    thread_local std::vector<Index> tuple;
    tuple.resize(static_cast<std::size_t>(order));
    core::unrank_tuple(r, m, order, tuple);
    double s = 0.0;
    for (int i = 0; i < order; ++i) {
      const Index xi = tuple[static_cast<std::size_t>(i)];
      const Index xj = tuple[static_cast<std::size_t>((i + step) % order)];
      const std::span<const double> u{field.data() + xi * d, static_cast<std::size_t>(d)};
      s += core::dot_diff(u, domain.point(xi), domain.point(xj));
    }
    return s;
  };
  const TupleScan scan = scan_tuples(m, order, options.tuple_cap, options.policy, defect_at);
  const IndexCycle cycle(order, scan.tuple, m);
  return outcome_from_scan(domain, scan, options.tolerance,
                           step == 1 ? CycleKind::Single : CycleKind::Step, step,
                           single_cycle_defect(domain, field, cycle, step));
}

CheckOutcome check_single(const DiscreteDomain& domain, std::span<const double> field,
                          int order, SingleMethod method, const CheckOptions& options) {
  if (order < 2) throw InvalidInputError("order must be >= 2");
  if (method == SingleMethod::Enumerate) return check_step(domain, field, order, 1, options);

  // Self-loops cost zero, so padding makes the tuple minimum equal to
  // min(0, best closed walk of length 2..N).
  const Index m = domain.size();
  const std::vector<double> cost = cost_graph(domain, field);
  const WalkResult walk = min_closed_walk(cost, m, order);
  if (!(walk.min_cost < -options.tolerance))
    return CheckOutcome{true, std::nullopt, std::min(walk.min_cost, 0.0)};

  std::vector<Index> tuple = walk.cycle;
  tuple.resize(static_cast<std::size_t>(order), walk.cycle.front());
  const IndexCycle cycle(order, std::move(tuple), m);
  const double defect = single_cycle_defect(domain, field, cycle, 1);
  CheckOutcome out{false, std::nullopt, defect};
  out.witness = CycleWitness{cycle, defect, CycleKind::Single, 1};
  return out;
}

CheckOutcome check_all_orders(const DiscreteDomain& domain, std::span<const double> field,
                              const CheckOptions& options) {
  const Index m = domain.size();
  const std::vector<double> cost = cost_graph(domain, field);

  // Bellman-Ford from a virtual source with delta-thresholded relaxation:
  // termination certifies every cycle cost >= -m*delta > -tolerance.
  const double delta = options.tolerance / (2.0 * static_cast<double>(m + 1));
  std::vector<double> dist(static_cast<std::size_t>(m), 0.0);
  std::vector<Index> pred(static_cast<std::size_t>(m), -1);
  Index touched = -1;
  for (Index pass = 0; pass < m + 1; ++pass) {
    touched = -1;
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) {
        const double cand = dist[static_cast<std::size_t>(i)] + cost[static_cast<std::size_t>(i * m + j)];
        if (cand < dist[static_cast<std::size_t>(j)] - delta) {
          dist[static_cast<std::size_t>(j)] = cand;
          pred[static_cast<std::size_t>(j)] = i;
          if (touched < 0) touched = j;
        }
      }
    }
    if (touched < 0) return CheckOutcome{true, std::nullopt, 0.0};
  }

  // Walk predecessors m steps to land inside a negative cycle.
  Index cur = touched;
  for (Index k = 0; k < m; ++k) cur = pred[static_cast<std::size_t>(cur)];
  std::vector<Index> cycle_vertices;
  Index v = cur;
  do {
    cycle_vertices.push_back(v);
    v = pred[static_cast<std::size_t>(v)];
  } while (v != cur);
  std::reverse(cycle_vertices.begin(), cycle_vertices.end());
  // Canonical rotation: start at the smallest index.
  const auto smallest = std::min_element(cycle_vertices.begin(), cycle_vertices.end());
  std::rotate(cycle_vertices.begin(), smallest, cycle_vertices.end());

  const int len = static_cast<int>(cycle_vertices.size());
  if (len >= 2) {
    const IndexCycle cycle(len, cycle_vertices, m);
    const double defect = single_cycle_defect(domain, field, cycle, 1);
    if (defect < -options.tolerance) {
      CheckOutcome out{false, std::nullopt, defect};
      out.witness = CycleWitness{cycle, defect, CycleKind::Single, 1};
      return out;
    }
  }

  // Knife-edge case: the relaxation flagged a cycle whose recomputed cost
  // is inside the tolerance band. Decide exactly with the walk DP.
  const WalkResult walk = min_closed_walk(cost, m, static_cast<int>(m));
  if (walk.min_cost < -options.tolerance) {
    const int wlen = static_cast<int>(walk.cycle.size());
    const IndexCycle cycle(wlen, walk.cycle, m);
    const double defect = single_cycle_defect(domain, field, cycle, 1);
    CheckOutcome out{false, std::nullopt, defect};
    out.witness = CycleWitness{cycle, defect, CycleKind::Single, 1};
    return out;
  }
  return CheckOutcome{true, std::nullopt, std::min(walk.min_cost, 0.0)};
}

}  // namespace cymono::monotonicity
