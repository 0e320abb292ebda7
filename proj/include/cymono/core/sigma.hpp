#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cymono/errors.hpp"

namespace cymono::core {

using Index = std::int64_t;  // domain point index, in [0, m)
using Rank = std::int64_t;   // flattened rank of an index tuple

// Default guard on dense tensor allocations (entry count).
inline constexpr Rank kDefaultTensorCap = 10'000'000;

// Cyclic shift sigma(t1,...,tN) = (t2,...,tN,t1).
inline void apply_sigma_inplace(std::span<Index> t) {
  if (t.size() < 2) return;
  const Index first = t[0];
  for (std::size_t i = 0; i + 1 < t.size(); ++i) t[i] = t[i + 1];
  t[t.size() - 1] = first;
}

inline std::vector<Index> apply_sigma(std::span<const Index> t) {
  std::vector<Index> out(t.begin(), t.end());
  apply_sigma_inplace(out);
  return out;
}

// m^(order-1), the stride of the first tuple slot in row-major ranks.
Rank tail_size(Index m, int order);

// Row-major rank; rank order coincides with lexicographic tuple order.
Rank tuple_rank(std::span<const Index> t, Index m);

void unrank_tuple(Rank r, Index m, int order, std::span<Index> out);

// Rank of sigma(t) from the rank of t in O(1):
// ((t2..tN) as prefix) * m + t1.
inline Rank sigma_rank(Rank r, Index m, Rank tail) { return (r % tail) * m + r / tail; }

// Rank of the diagonal tuple (i,i,...,i).
Rank diagonal_rank(Index i, Index m, int order);

// Number of tensor entries m^order; throws CapExceededError beyond cap.
Rank checked_tensor_size(Index m, int order, Rank cap = kDefaultTensorCap);

}  // namespace cymono::core
