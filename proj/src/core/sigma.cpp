#include "cymono/core/sigma.hpp"

#include <string>

namespace cymono::core {

Rank tail_size(Index m, int order) {
  Rank t = 1;
  for (int k = 1; k < order; ++k) t *= m;
  return t;
}

Rank tuple_rank(std::span<const Index> t, Index m) {
  Rank r = 0;
  for (const Index i : t) r = r * m + i;
  return r;
}

void unrank_tuple(Rank r, Index m, int order, std::span<Index> out) {
  for (int k = order - 1; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = static_cast<Index>(r % m);
    r /= m;
  }
}

Rank diagonal_rank(Index i, Index m, int order) {
  Rank r = 0;
  for (int k = 0; k < order; ++k) r = r * m + i;
  return r;
}

Rank checked_tensor_size(Index m, int order, Rank cap) {
  if (m < 1 || order < 1) throw InvalidInputError("tensor shape requires m >= 1 and order >= 1");
  Rank size = 1;
  for (int k = 0; k < order; ++k) {
    if (size > cap / m) {
      throw CapExceededError("tensor of " + std::to_string(m) + "^" + std::to_string(order) +
                             " entries exceeds the cap of " + std::to_string(cap));
    }
    size *= m;
  }
  if (size > cap) {
    throw CapExceededError("tensor of " + std::to_string(size) +
                           " entries exceeds the cap of " + std::to_string(cap));
  }
  return size;
}

}  // namespace cymono::core
