#pragma once

#include <span>
#include <vector>

#include "cymono/core/domain.hpp"
#include "cymono/core/kernels.hpp"
#include "cymono/core/sigma.hpp"

namespace cymono::core {

struct HamiltonianFlags {
  bool diagonal_zero = false;
  bool sub_antisymmetric = false;
  bool antisymmetric = false;
};

// Tolerances the flag claims are verified at on construction.
struct FlagTolerances {
  double sub_antisymmetric = 1e-9;
  double antisymmetric = 1e-9;
};

// Dense real-valued function on order-N tuples of domain indices.
// Claimed flags are verified by full tensor scans at construction.
class GridHamiltonian {
 public:
  GridHamiltonian(int order, Index m, std::vector<double> values,
                  HamiltonianFlags flags = {}, FlagTolerances tol = {},
                  ExecPolicy policy = ExecPolicy::Parallel);

  int order() const { return order_; }
  Index m() const { return m_; }
  Rank size() const { return static_cast<Rank>(values_.size()); }
  Rank tail() const { return tail_; }

  double operator[](Rank r) const { return values_[static_cast<std::size_t>(r)]; }
  double at(std::span<const Index> t) const { return values_[static_cast<std::size_t>(tuple_rank(t, m_))]; }
  std::span<const double> values() const { return values_; }

  const HamiltonianFlags& flags() const { return flags_; }

  // Sum over the N cyclic rotations of the tuple with rank r.
  double rotation_sum(Rank r) const;

 private:
  int order_;
  Index m_;
  Rank tail_;
  std::vector<double> values_;
  HamiltonianFlags flags_;
};

// Full-scan statistics used by flag verification and the test suites.
double max_rotation_sum(const GridHamiltonian& h, ExecPolicy policy = ExecPolicy::Parallel);
double max_abs_rotation_sum(const GridHamiltonian& h, ExecPolicy policy = ExecPolicy::Parallel);
double max_abs_diagonal(const GridHamiltonian& h);

// sigma-invariant probability tensor on index N-tuples with first
// marginal equal to the domain weights. Invariants verified at
// construction: entries >= 0, total mass 1 (1e-10), pi = pi o sigma
// (1e-12), first marginal (1e-10).
class SigmaCoupling {
 public:
  SigmaCoupling(int order, Index m, std::vector<double> mass,
                std::span<const double> first_marginal,
                ExecPolicy policy = ExecPolicy::Parallel);

  int order() const { return order_; }
  Index m() const { return m_; }
  Rank size() const { return static_cast<Rank>(mass_.size()); }
  double operator[](Rank r) const { return mass_[static_cast<std::size_t>(r)]; }
  std::span<const double> mass() const { return mass_; }

  // <c, pi> in fixed chunk order.
  double pair_with(const GridHamiltonian& cost, ExecPolicy policy = ExecPolicy::Parallel) const;

 private:
  int order_;
  Index m_;
  std::vector<double> mass_;
};

}  // namespace cymono::core
