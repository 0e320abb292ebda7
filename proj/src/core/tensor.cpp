#include "cymono/core/tensor.hpp"

#include <cmath>
#include <string>

namespace cymono::core {

GridHamiltonian::GridHamiltonian(int order, Index m, std::vector<double> values,
                                 HamiltonianFlags flags, FlagTolerances tol, ExecPolicy policy)
    : order_(order), m_(m), values_(std::move(values)), flags_(flags) {
  if (order_ < 2 || m_ < 1) throw InvalidInputError("tensor requires order >= 2 and m >= 1");
  Rank size = 1;
  for (int k = 0; k < order_; ++k) size *= m_;
  if (static_cast<Rank>(values_.size()) != size)
    throw InvalidInputError("tensor value count is not m^order");
  tail_ = size / m_;
  for (const double v : values_) {
    if (!std::isfinite(v)) throw InvalidInputError("tensor contains a non-finite entry");
  }

  if (flags_.diagonal_zero) {
    for (Index i = 0; i < m_; ++i) {
      if (values_[static_cast<std::size_t>(diagonal_rank(i, m_, order_))] != 0.0)
        throw InvalidInputError("diagonal_zero claimed but H(i,...,i) != 0 at i=" +
                                std::to_string(i));
    }
  }
  if (flags_.antisymmetric) {
    const double worst = max_abs_rotation_sum(*this, policy);
    if (worst > tol.antisymmetric)
      throw InvalidInputError("antisymmetric claimed but |rotation sum| reaches " +
                              std::to_string(worst));
  } else if (flags_.sub_antisymmetric) {
    const double worst = max_rotation_sum(*this, policy);
    if (worst > tol.sub_antisymmetric)
      throw InvalidInputError("sub_antisymmetric claimed but a rotation sum reaches " +
                              std::to_string(worst));
  }
}

double GridHamiltonian::rotation_sum(Rank r) const {
  double s = 0.0;
  Rank cur = r;
  for (int k = 0; k < order_; ++k) {
    s += values_[static_cast<std::size_t>(cur)];
    cur = sigma_rank(cur, m_, tail_);
  }
  return s;
}

double max_rotation_sum(const GridHamiltonian& h, ExecPolicy policy) {
  return scan_max_value(h.size(), policy, [&](Rank r) { return h.rotation_sum(r); });
}

double max_abs_rotation_sum(const GridHamiltonian& h, ExecPolicy policy) {
  return scan_max_value(h.size(), policy, [&](Rank r) { return std::abs(h.rotation_sum(r)); });
}

double max_abs_diagonal(const GridHamiltonian& h) {
  double worst = 0.0;
  for (Index i = 0; i < h.m(); ++i)
    worst = std::max(worst, std::abs(h[diagonal_rank(i, h.m(), h.order())]));
  return worst;
}

SigmaCoupling::SigmaCoupling(int order, Index m, std::vector<double> mass,
                             std::span<const double> first_marginal, ExecPolicy policy)
    : order_(order), m_(m), mass_(std::move(mass)) {
  if (order_ < 2 || m_ < 1) throw InvalidInputError("coupling requires order >= 2 and m >= 1");
  Rank size = 1;
  for (int k = 0; k < order_; ++k) size *= m_;
  if (static_cast<Rank>(mass_.size()) != size)
    throw InvalidInputError("coupling entry count is not m^order");
  if (static_cast<Index>(first_marginal.size()) != m_)
    throw InvalidInputError("first marginal size mismatch");

  for (const double v : mass_) {
    if (!std::isfinite(v) || v < 0.0)
      throw InvalidInputError("coupling entries must be finite and nonnegative");
  }

  const double total = scan_sum(size, policy, [&](Rank r) { return mass_[static_cast<std::size_t>(r)]; });
  if (std::abs(total - 1.0) > 1e-10)
    throw InvalidInputError("coupling mass is " + std::to_string(total) + ", not 1");

  const Rank tail = size / m_;
  const double invariance = scan_max_value(size, policy, [&](Rank r) {
    return std::abs(mass_[static_cast<std::size_t>(r)] -
                    mass_[static_cast<std::size_t>(sigma_rank(r, m_, tail))]);
  });
  if (invariance > 1e-12)
    throw InvalidInputError("coupling is not sigma-invariant (deviation " +
                            std::to_string(invariance) + ")");

  for (Index i = 0; i < m_; ++i) {
    const double row = scan_sum(tail, policy, [&](Rank t) {
      return mass_[static_cast<std::size_t>(i * tail + t)];
    });
    if (std::abs(row - first_marginal[static_cast<std::size_t>(i)]) > 1e-10)
      throw InvalidInputError("first marginal mismatch at index " + std::to_string(i));
  }
}

double SigmaCoupling::pair_with(const GridHamiltonian& cost, ExecPolicy policy) const {
  if (cost.order() != order_ || cost.m() != m_)
    throw InvalidInputError("cost tensor shape does not match the coupling");
  return scan_sum(size(), policy, [&](Rank r) {
    return cost[r] * mass_[static_cast<std::size_t>(r)];
  });
}

}  // namespace cymono::core
