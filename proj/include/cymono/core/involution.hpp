#pragma once

#include <vector>

#include "cymono/core/sigma.hpp"

namespace cymono::core {

// A permutation S of {0,...,m-1} with S^N = identity, i.e. every cycle
// length divides N. Immutable.
class NInvolution {
 public:
  NInvolution(int order, std::vector<Index> perm);

  static NInvolution identity(int order, Index m);

  int order() const { return order_; }
  Index size() const { return static_cast<Index>(perm_.size()); }
  Index apply(Index i) const { return perm_[static_cast<std::size_t>(i)]; }
  // S^times(i), 0 <= times.
  Index apply_pow(Index i, int times) const;
  const std::vector<Index>& perm() const { return perm_; }

  // Cycles in canonical form: each starts at its smallest element,
  // cycles ordered by that element.
  std::vector<std::vector<Index>> cycles() const;

 private:
  int order_;
  std::vector<Index> perm_;
};

// True iff `perm` is a bijection of {0..m-1}; no order constraint.
bool is_permutation(std::span<const Index> perm);

// True iff applying `perm` N times is the identity (perm must be a
// bijection).
bool power_is_identity(std::span<const Index> perm, int order);

}  // namespace cymono::core
