#include "cymono/core/involution.hpp"

#include <numeric>
#include <string>

#include "cymono/errors.hpp"

namespace cymono::core {

bool is_permutation(std::span<const Index> perm) {
  const Index m = static_cast<Index>(perm.size());
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  for (const Index v : perm) {
    if (v < 0 || v >= m || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

bool power_is_identity(std::span<const Index> perm, int order) {
  const Index m = static_cast<Index>(perm.size());
  for (Index i = 0; i < m; ++i) {
    Index cur = i;
    for (int k = 0; k < order; ++k) cur = perm[static_cast<std::size_t>(cur)];
    if (cur != i) return false;
  }
  return true;
}

NInvolution::NInvolution(int order, std::vector<Index> perm)
    : order_(order), perm_(std::move(perm)) {
  if (order_ < 2) throw InvalidInputError("involution order must be >= 2");
  if (perm_.empty()) throw InvalidInputError("involution permutation is empty");
  if (!is_permutation(perm_)) throw InvalidInputError("involution map is not a bijection");
  if (!power_is_identity(perm_, order_))
    throw InvalidInputError("S^" + std::to_string(order_) + " is not the identity");
}

NInvolution NInvolution::identity(int order, Index m) {
  std::vector<Index> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), Index{0});
  return NInvolution(order, std::move(perm));
}

Index NInvolution::apply_pow(Index i, int times) const {
  Index cur = i;
  for (int k = 0; k < times % order_; ++k) cur = perm_[static_cast<std::size_t>(cur)];
  return cur;
}

std::vector<std::vector<Index>> NInvolution::cycles() const {
  const Index m = size();
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  std::vector<std::vector<Index>> out;
  for (Index i = 0; i < m; ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    std::vector<Index> cycle;
    Index cur = i;
    while (!seen[static_cast<std::size_t>(cur)]) {
      seen[static_cast<std::size_t>(cur)] = true;
      cycle.push_back(cur);
      cur = perm_[static_cast<std::size_t>(cur)];
    }
    out.push_back(std::move(cycle));
  }
  return out;
}

}  // namespace cymono::core
