#include "cymono/transport/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cymono/hamiltonian/hamiltonian.hpp"
#include "cymono/rng.hpp"

namespace cymono::transport {

namespace {

using core::IndexCycle;
using core::sigma_rank;
using core::tuple_rank;
using core::unrank_tuple;

struct Orbit {
  Rank representative;  // smallest rank in the orbit
  int period;           // orbit length, divides N
  double mean_cost;     // orbit-averaged cost
};

void require_uniform(const DiscreteDomain& domain, const char* what) {
  if (!domain.uniform_weights())
    throw InvalidInputError(std::string(what) + " requires uniform weights");
}

}  // namespace

TransportResult solve_sigma_kantorovich(const DiscreteDomain& domain, const FieldTuple& fields,
                                        const TransportOptions& options) {
  fields.require_compatible(domain);
  const int n = fields.order();
  const Index m = domain.size();
  const GridHamiltonian cost = hamiltonian::build_cost_f(
      domain, fields, {options.tensor_cap, options.policy, options.lp});
  const Rank size = cost.size();
  const Rank tail = cost.tail();

  // Enumerate sigma-orbits; an ascending scan meets each orbit at its
  // smallest rank first.
  std::vector<bool> visited(static_cast<std::size_t>(size), false);
  std::vector<Orbit> orbits;
  for (Rank r = 0; r < size; ++r) {
    if (visited[static_cast<std::size_t>(r)]) continue;
    double total = cost[r];
    int period = 1;
    visited[static_cast<std::size_t>(r)] = true;
    for (Rank cur = sigma_rank(r, m, tail); cur != r; cur = sigma_rank(cur, m, tail)) {
      visited[static_cast<std::size_t>(cur)] = true;
      total += cost[cur];
      ++period;
    }
    orbits.push_back(Orbit{r, period, total / static_cast<double>(period)});
  }

  // One variable per orbit (total orbit mass); first-marginal rows.
  const std::size_t cols = orbits.size();
  lp::LinearProgram program;
  program.objective.resize(cols);
  program.constraint_matrix.assign(static_cast<std::size_t>(m) * cols, 0.0);
  program.rhs.assign(domain.weights().begin(), domain.weights().end());
  std::vector<Index> tuple(static_cast<std::size_t>(n));
  for (std::size_t o = 0; o < cols; ++o) {
    program.objective[o] = orbits[o].mean_cost;
    Rank cur = orbits[o].representative;
    for (int k = 0; k < orbits[o].period; ++k) {
      const Index first = static_cast<Index>(cur / tail);
      program.constraint_matrix[static_cast<std::size_t>(first) * cols + o] +=
          1.0 / static_cast<double>(orbits[o].period);
      cur = sigma_rank(cur, m, tail);
    }
  }

  const lp::LPSolution solution = lp::lp_solve(program, options.lp);
  if (solution.status != lp::LPStatus::Optimal)
    throw Error("sigma-invariant transport LP did not reach an optimum");

  // Reconstruct the full tensor: constant mass per orbit tuple.
  std::vector<double> mass(static_cast<std::size_t>(size), 0.0);
  for (std::size_t o = 0; o < cols; ++o) {
    double w = solution.x[o];
    if (w < 0.0) {
      if (w < -1e-10) throw Error("transport LP produced a negative orbit mass");
      w = 0.0;
    }
    const double per_tuple = w / static_cast<double>(orbits[o].period);
    Rank cur = orbits[o].representative;
    for (int k = 0; k < orbits[o].period; ++k) {
      mass[static_cast<std::size_t>(cur)] = per_tuple;
      cur = sigma_rank(cur, m, tail);
    }
  }

  SigmaCoupling coupling(n, m, std::move(mass), domain.weights(), options.policy);
  return TransportResult{solution.objective, std::move(coupling),
                         static_cast<int>(cols), static_cast<int>(m)};
}

SigmaCoupling diagonal_coupling(const DiscreteDomain& domain, int order) {
  const Index m = domain.size();
  const Rank size = core::checked_tensor_size(m, order);
  std::vector<double> mass(static_cast<std::size_t>(size), 0.0);
  for (Index i = 0; i < m; ++i)
    mass[static_cast<std::size_t>(core::diagonal_rank(i, m, order))] = domain.weight(i);
  return SigmaCoupling(order, m, std::move(mass), domain.weights());
}

SigmaCoupling pushforward_coupling(const NInvolution& s, const DiscreteDomain& domain) {
  const Index m = domain.size();
  if (s.size() != m) throw InvalidInputError("involution does not match the domain");
  const int order = s.order();
  if (!domain.uniform_weights()) {
    for (Index i = 0; i < m; ++i) {
      if (std::abs(domain.weight(s.apply(i)) - domain.weight(i)) > 1e-12)
        throw InvalidInputError(
            "non-uniform weights mix unequal masses along an orbit of S");
    }
  }
  const Rank size = core::checked_tensor_size(m, order);
  std::vector<double> mass(static_cast<std::size_t>(size), 0.0);
  std::vector<Index> tuple(static_cast<std::size_t>(order));
  for (Index i = 0; i < m; ++i) {
    Index cur = i;
    for (int k = 0; k < order; ++k) {
      tuple[static_cast<std::size_t>(k)] = cur;
      cur = s.apply(cur);
    }
    mass[static_cast<std::size_t>(tuple_rank(tuple, m))] += domain.weight(i);
  }
  // Lemma's 2 => 1 direction is checked by the coupling invariants.
  return SigmaCoupling(order, m, std::move(mass), domain.weights());
}

GraphLemmaReport verify_graph_lemma(std::span<const Index> map, const DiscreteDomain& domain,
                                    int order, std::uint64_t seed, int basket_size) {
  const Index m = domain.size();
  if (static_cast<Index>(map.size()) != m) throw InvalidInputError("map size mismatch");
  for (const Index v : map)
    if (v < 0 || v >= m) throw InvalidInputError("map value out of range");

  GraphLemmaReport report;

  // Graph tuples (j, Sj, ..., S^{N-1} j) and powers S^k(j).
  std::vector<std::vector<Index>> powers(static_cast<std::size_t>(order) + 1,
                                         std::vector<Index>(static_cast<std::size_t>(m)));
  for (Index j = 0; j < m; ++j) powers[0][static_cast<std::size_t>(j)] = j;
  for (int k = 1; k <= order; ++k)
    for (Index j = 0; j < m; ++j)
      powers[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] =
          map[static_cast<std::size_t>(powers[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j)])];

  // (a) Indicator family H = f(x_1) - f(x_i): residual mu_k - (S^l)_# mu_k.
  double worst_indicator = 0.0;
  for (int l = 1; l < order; ++l) {
    for (Index k = 0; k < m; ++k) {
      double pushed = 0.0;
      for (Index j = 0; j < m; ++j)
        if (powers[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] == k)
          pushed += domain.weight(j);
      worst_indicator = std::max(worst_indicator, std::abs(domain.weight(k) - pushed));
    }
  }
  report.max_indicator_residual = worst_indicator;

  // (b) The absolute-value Hamiltonian integrated along the graph; its
  // value is the integral of |x - S^N x|.
  const int d = domain.dimension();
  auto norm_diff = [&](Index a, Index b) {
    double s = 0.0;
    const std::span<const double> xa = domain.point(a);
    const std::span<const double> xb = domain.point(b);
    for (int c = 0; c < d; ++c) {
      const double diff = xa[static_cast<std::size_t>(c)] - xb[static_cast<std::size_t>(c)];
      s += diff * diff;
    }
    return std::sqrt(s);
  };
  double abs_integral = 0.0;
  for (Index j = 0; j < m; ++j) {
    // H = |x1 - S xN| - |S x1 - x2| - |x2 - S x1| + |S x2 - x3| along the
    // graph tuple, with the convention x_{N+i} = x_i.
    const Index x1 = j;
    const Index x2 = powers[1][static_cast<std::size_t>(j)];
    const Index x3 = powers[static_cast<std::size_t>(order >= 3 ? 2 : 0)][static_cast<std::size_t>(j)];
    const Index xn = powers[static_cast<std::size_t>(order - 1)][static_cast<std::size_t>(j)];
    const double h = norm_diff(x1, map[static_cast<std::size_t>(xn)]) -
                     norm_diff(map[static_cast<std::size_t>(x1)], x2) -
                     norm_diff(x2, map[static_cast<std::size_t>(x1)]) +
                     norm_diff(map[static_cast<std::size_t>(x2)], x3);
    abs_integral += domain.weight(j) * h;
  }
  report.abs_value_integral = abs_integral;

  // (c) Random antisymmetric Hamiltonians.
  double worst_basket = 0.0;
  try {
    const Rank size = core::checked_tensor_size(m, order);
    Rng rng(SeedSequence(seed).stream("graph-lemma-basket"));
    for (int b = 0; b < basket_size; ++b) {
      std::vector<double> raw(static_cast<std::size_t>(size));
      for (double& v : raw) v = rng.uniform(-1.0, 1.0);
      const GridHamiltonian h0(order, m, std::move(raw));
      const GridHamiltonian anti = hamiltonian::antisymmetrize(h0, {});
      double integral = 0.0;
      std::vector<Index> tuple(static_cast<std::size_t>(order));
      for (Index j = 0; j < m; ++j) {
        for (int k = 0; k < order; ++k)
          tuple[static_cast<std::size_t>(k)] = powers[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        integral += domain.weight(j) * anti.at(tuple);
      }
      worst_basket = std::max(worst_basket, std::abs(integral));
    }
  } catch (const CapExceededError&) {
    // Basket skipped above the tensor cap; indicator and absolute-value
    // tests still decide.
  }
  report.max_basket_integral = worst_basket;

  const double tol = 1e-10;
  report.antisymmetric_integrals_vanish = report.max_indicator_residual <= tol &&
                                          std::abs(report.abs_value_integral) <= tol &&
                                          report.max_basket_integral <= tol;

  // Condition 2 directly.
  report.measure_preserving_involution = core::is_permutation(map) &&
                                         core::power_is_identity(map, order) &&
                                         report.max_indicator_residual <= tol;

  // Condition 1: build the push-forward tensor and test the coupling
  // invariants directly. Above the tensor cap, condition 2 decides (the
  // two are equivalent).
  try {
    const Rank size = core::checked_tensor_size(m, order);
    std::vector<double> mass(static_cast<std::size_t>(size), 0.0);
    std::vector<Index> tuple(static_cast<std::size_t>(order));
    for (Index j = 0; j < m; ++j) {
      for (int k = 0; k < order; ++k)
        tuple[static_cast<std::size_t>(k)] = powers[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      mass[static_cast<std::size_t>(tuple_rank(tuple, m))] += domain.weight(j);
    }
    const SigmaCoupling probe(order, m, std::move(mass), domain.weights());
    (void)probe;
    report.pushforward_sigma_invariant = true;
  } catch (const InvalidInputError&) {
    report.pushforward_sigma_invariant = false;
  } catch (const CapExceededError&) {
    report.pushforward_sigma_invariant = report.measure_preserving_involution;
  }

  return report;
}

double involution_objective(const DiscreteDomain& domain, const FieldTuple& fields,
                            const NInvolution& s) {
  fields.require_compatible(domain);
  if (s.size() != domain.size()) throw InvalidInputError("involution does not match the domain");
  const int n = fields.order();
  double total = 0.0;
  for (Index i = 0; i < domain.size(); ++i) {
    Index cur = i;
    double per_point = 0.0;
    for (int l = 1; l < n; ++l) {
      cur = s.apply(cur);
      per_point += core::dot_diff(fields.value(l - 1, i), domain.point(i), domain.point(cur));
    }
    total += domain.weight(i) * per_point;
  }
  return total;
}

namespace {

// Lexicographic comparison of permutation words.
bool perm_less(const std::vector<Index>& a, const std::vector<Index>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::vector<int> order_divisors(int order) {
  std::vector<int> divisors;
  for (int k = 2; k <= order; ++k)
    if (order % k == 0) divisors.push_back(k);
  return divisors;
}

struct Candidate {
  double value;
  std::vector<Index> perm;
};

void keep_better(Candidate& best, const Candidate& other) {
  if (other.value < best.value ||
      (other.value == best.value && perm_less(other.perm, best.perm)))
    best = other;
}

InvolutionResult solve_exact(const DiscreteDomain& domain, const FieldTuple& fields,
                             const InvolutionOptions& options) {
  const Index m = domain.size();
  if (m > options.factorial_cap)
    throw CapExceededError("exact involution search over " + std::to_string(m) +
                           " points exceeds the factorial cap " +
                           std::to_string(options.factorial_cap));
  const int order = fields.order();

  std::vector<std::vector<Index>> candidates;
  std::vector<Index> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), Index{0});
  do {
    if (core::power_is_identity(perm, order)) candidates.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  // Parallel evaluation in chunks; ties keep the earlier (lexicographically
  // smaller) candidate, matching the serial scan.
  std::vector<double> values(candidates.size());
  core::fill_indexed(static_cast<Rank>(candidates.size()), options.policy, [&](Rank c) {
    values[static_cast<std::size_t>(c)] = involution_objective(
        domain, fields, NInvolution(order, candidates[static_cast<std::size_t>(c)]));
  });
  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c)
    if (values[c] < values[best]) best = c;

  return InvolutionResult{values[best], NInvolution(order, candidates[best]),
                          InvolutionMethod::Exact, true};
}

// Moves: dissolve one cycle into fixed points; splice fixed points into a
// k-cycle (k | N); exchange one cycle member with a fixed point. These are
// the discrete shifts behind the ball-shift construction.
std::vector<std::vector<Index>> local_moves(const std::vector<Index>& perm, int order) {
  const Index m = static_cast<Index>(perm.size());
  std::vector<std::vector<Index>> moves;
  const NInvolution s(order, perm);
  const std::vector<std::vector<Index>> cycles = s.cycles();

  std::vector<Index> fixed;
  for (const auto& cycle : cycles)
    if (cycle.size() == 1) fixed.push_back(cycle[0]);

  for (const auto& cycle : cycles) {
    if (cycle.size() < 2) continue;
    std::vector<Index> next(perm);
    for (const Index v : cycle) next[static_cast<std::size_t>(v)] = v;
    moves.push_back(std::move(next));
  }

  const std::vector<int> lengths = order_divisors(order);
  for (const int k : lengths) {
    if (static_cast<std::size_t>(k) > fixed.size()) continue;
    // Ascending combinations of fixed points.
    std::vector<std::size_t> comb(static_cast<std::size_t>(k));
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    while (true) {
      // All cyclic arrangements with the smallest element first.
      std::vector<Index> members(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) members[static_cast<std::size_t>(i)] = fixed[comb[static_cast<std::size_t>(i)]];
      std::vector<Index> rest(members.begin() + 1, members.end());
      std::sort(rest.begin(), rest.end());
      do {
        std::vector<Index> next(perm);
        Index prev = members[0];
        for (const Index v : rest) {
          next[static_cast<std::size_t>(prev)] = v;
          prev = v;
        }
        next[static_cast<std::size_t>(prev)] = members[0];
        moves.push_back(std::move(next));
      } while (std::next_permutation(rest.begin(), rest.end()));

      // Next combination.
      int pos = k - 1;
      while (pos >= 0 &&
             comb[static_cast<std::size_t>(pos)] == fixed.size() - static_cast<std::size_t>(k - pos))
        --pos;
      if (pos < 0) break;
      ++comb[static_cast<std::size_t>(pos)];
      for (int q = pos + 1; q < k; ++q)
        comb[static_cast<std::size_t>(q)] = comb[static_cast<std::size_t>(q - 1)] + 1;
    }
  }

  // Exchange one cycle member with a fixed point.
  for (const auto& cycle : cycles) {
    if (cycle.size() < 2) continue;
    for (std::size_t pos = 0; pos < cycle.size(); ++pos) {
      for (const Index f : fixed) {
        std::vector<Index> members = cycle;
        const Index out = members[pos];
        members[pos] = f;
        std::vector<Index> next(perm);
        next[static_cast<std::size_t>(out)] = out;
        for (std::size_t q = 0; q < members.size(); ++q)
          next[static_cast<std::size_t>(members[q])] = members[(q + 1) % members.size()];
        moves.push_back(std::move(next));
      }
    }
  }

  (void)m;
  return moves;
}

std::vector<Index> random_involution(Index m, int order, Rng& rng) {
  std::vector<Index> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), Index{0});
  rng.shuffle(pool);
  std::vector<int> lengths{1};
  for (const int k : order_divisors(order)) lengths.push_back(k);
  std::vector<Index> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::size_t at = 0;
  while (at < pool.size()) {
    int k = lengths[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(lengths.size()) - 1))];
    if (static_cast<std::size_t>(k) > pool.size() - at) k = 1;
    for (int i = 0; i < k; ++i) {
      const Index from = pool[at + static_cast<std::size_t>(i)];
      const Index to = pool[at + static_cast<std::size_t>((i + 1) % k)];
      perm[static_cast<std::size_t>(from)] = to;
    }
    at += static_cast<std::size_t>(k);
  }
  return perm;
}

InvolutionResult solve_local(const DiscreteDomain& domain, const FieldTuple& fields,
                             const InvolutionOptions& options) {
  const Index m = domain.size();
  const int order = fields.order();
  const SeedSequence seeds(options.seed);

  Candidate best{0.0, std::vector<Index>(static_cast<std::size_t>(m))};
  std::iota(best.perm.begin(), best.perm.end(), Index{0});
  best.value = involution_objective(domain, fields, NInvolution(order, best.perm));

  for (int restart = 0; restart < std::max(options.restarts, 1); ++restart) {
    std::vector<Index> current;
    if (restart == 0) {
      current.resize(static_cast<std::size_t>(m));
      std::iota(current.begin(), current.end(), Index{0});
    } else {
      Rng rng(seeds.stream("involution-restart-" + std::to_string(restart)));
      current = random_involution(m, order, rng);
    }
    double value = involution_objective(domain, fields, NInvolution(order, current));

    bool improved = true;
    while (improved) {
      improved = false;
      const std::vector<std::vector<Index>> moves = local_moves(current, order);
      Candidate step{value, current};
      for (const auto& move : moves) {
        const double v = involution_objective(domain, fields, NInvolution(order, move));
        if (v < step.value - 1e-12) {
          step = Candidate{v, move};
        }
      }
      if (step.value < value - 1e-12) {
        current = step.perm;
        value = step.value;
        improved = true;
      }
    }
    keep_better(best, Candidate{value, current});
  }

  return InvolutionResult{best.value, NInvolution(order, best.perm), InvolutionMethod::Local,
                          false};
}

}  // namespace

InvolutionResult solve_involution_polar(const DiscreteDomain& domain, const FieldTuple& fields,
                                        InvolutionMethod method,
                                        const InvolutionOptions& options) {
  fields.require_compatible(domain);
  require_uniform(domain, "the involution polar problem");
  if (method == InvolutionMethod::Exact) return solve_exact(domain, fields, options);
  return solve_local(domain, fields, options);
}

double projection_objective(const DiscreteDomain& domain, const FieldTuple& fields,
                            const NInvolution& s) {
  fields.require_compatible(domain);
  require_uniform(domain, "the projection problem");
  if (s.size() != domain.size()) throw InvalidInputError("involution does not match the domain");
  const int n = fields.order();
  const int d = domain.dimension();
  double total = 0.0;
  for (int l = 1; l < n; ++l) {
    for (Index i = 0; i < domain.size(); ++i) {
      const Index target = s.apply_pow(i, l);
      const std::span<const double> u = fields.value(l - 1, i);
      const std::span<const double> x = domain.point(target);
      double sq = 0.0;
      for (int c = 0; c < d; ++c) {
        const double diff = u[static_cast<std::size_t>(c)] - x[static_cast<std::size_t>(c)];
        sq += diff * diff;
      }
      total += domain.weight(i) * sq;
    }
  }
  return total;
}

double projection_expand_identity_residual(const DiscreteDomain& domain,
                                           const FieldTuple& fields, const NInvolution& s) {
  const int n = fields.order();
  const int d = domain.dimension();
  const double direct = projection_objective(domain, fields, s);
  double norm_u = 0.0;
  double cross = 0.0;
  double norm_x = 0.0;
  for (Index i = 0; i < domain.size(); ++i) {
    const std::span<const double> x = domain.point(i);
    double nx = 0.0;
    for (int c = 0; c < d; ++c) nx += x[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
    norm_x += domain.weight(i) * nx;
    for (int l = 1; l < n; ++l) {
      const std::span<const double> u = fields.value(l - 1, i);
      double nu = 0.0;
      for (int c = 0; c < d; ++c) nu += u[static_cast<std::size_t>(c)] * u[static_cast<std::size_t>(c)];
      norm_u += domain.weight(i) * nu;
      cross += domain.weight(i) * core::dot(u, domain.point(s.apply_pow(i, l)));
    }
  }
  const double expanded = norm_u - 2.0 * cross + static_cast<double>(n - 1) * norm_x;
  return std::abs(direct - expanded);
}

double duality_gap(const DiscreteDomain& domain, const FieldTuple& fields,
                   const GridHamiltonian& h, const NInvolution& s, ExecPolicy policy) {
  fields.require_compatible(domain);
  require_uniform(domain, "the duality gap");
  if (!h.flags().antisymmetric)
    throw InvalidInputError("duality gap requires the antisymmetric flag");
  const int n = fields.order();
  const int d = domain.dimension();
  double lh_total = 0.0;
  double pairing = 0.0;
  std::vector<double> p(static_cast<std::size_t>((n - 1) * d));
  for (Index i = 0; i < domain.size(); ++i) {
    for (int l = 0; l < n - 1; ++l) {
      const std::span<const double> u = fields.value(l, i);
      for (int c = 0; c < d; ++c) p[static_cast<std::size_t>(l * d + c)] = u[static_cast<std::size_t>(c)];
    }
    lh_total += domain.weight(i) *
                hamiltonian::legendre_transform(h, domain, i, p, policy).value;
    for (int l = 1; l < n; ++l)
      pairing += domain.weight(i) *
                 core::dot(fields.value(l - 1, i), domain.point(s.apply_pow(i, l)));
  }
  return lh_total - pairing;
}

std::optional<CycleWitness> extract_violation(const DiscreteDomain& domain,
                                              const FieldTuple& fields,
                                              const TransportResult& result,
                                              double tolerance) {
  const int n = fields.order();
  const Index m = domain.size();
  const Rank size = result.coupling.size();

  // Scan support tuples for the most negative orbit defect.
  double best_defect = 0.0;
  Rank best_rank = -1;
  std::vector<Index> tuple(static_cast<std::size_t>(n));
  for (Rank r = 0; r < size; ++r) {
    if (result.coupling[r] <= 1e-12) continue;
    unrank_tuple(r, m, n, tuple);
    const IndexCycle cycle(n, tuple, m);
    const double defect = monotonicity::cycle_defect(domain, fields, cycle);
    if (defect < best_defect) {
      best_defect = defect;
      best_rank = r;
    }
  }
  if (best_rank < 0 || best_defect >= -tolerance) return std::nullopt;
  unrank_tuple(best_rank, m, n, tuple);
  const IndexCycle cycle(n, tuple, m);
  return CycleWitness{cycle, monotonicity::cycle_defect(domain, fields, cycle),
                      monotonicity::CycleKind::Joint, 1};
}

}  // namespace cymono::transport
