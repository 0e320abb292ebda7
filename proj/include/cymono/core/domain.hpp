#pragma once

#include <span>
#include <vector>

#include "cymono/core/sigma.hpp"
#include "cymono/errors.hpp"

namespace cymono::core {

// A finite weighted point cloud: m pairwise-distinct points in R^d with
// probability masses. Immutable after construction.
class DiscreteDomain {
 public:
  // points_flat is row-major m x d. Empty weights means uniform 1/m.
  DiscreteDomain(int dimension, std::vector<double> points_flat,
                 std::vector<double> weights = {});

  int dimension() const { return dimension_; }
  Index size() const { return m_; }

  std::span<const double> point(Index i) const {
    return {points_.data() + i * dimension_, static_cast<std::size_t>(dimension_)};
  }
  std::span<const double> points_flat() const { return points_; }

  double weight(Index i) const { return weights_[static_cast<std::size_t>(i)]; }
  std::span<const double> weights() const { return weights_; }
  bool uniform_weights() const { return uniform_; }

  // True when the points are a 1-d grid with constant spacing; `spacing`
  // receives the step. Used for finite-difference diagnostics only.
  bool regular_grid_1d(double* spacing) const;

 private:
  int dimension_;
  Index m_;
  std::vector<double> points_;
  std::vector<double> weights_;
  bool uniform_;
};

// The (N-1) sampled vector fields of an order-N problem:
// value(l, i) = u_{l+1}(x_i), l in [0, N-2]. Immutable.
class FieldTuple {
 public:
  // values_flat is (N-1) x m x d row-major.
  FieldTuple(int order, Index m, int dimension, std::vector<double> values_flat);

  static FieldTuple zeros(int order, Index m, int dimension);

  int order() const { return order_; }
  int field_count() const { return order_ - 1; }
  Index points() const { return m_; }
  int dimension() const { return dimension_; }

  std::span<const double> value(int l, Index i) const {
    const Rank off = (static_cast<Rank>(l) * m_ + i) * dimension_;
    return {values_.data() + off, static_cast<std::size_t>(dimension_)};
  }
  // One whole field as a flat m x d block.
  std::span<const double> field(int l) const {
    const Rank off = static_cast<Rank>(l) * m_ * dimension_;
    return {values_.data() + off, static_cast<std::size_t>(m_ * dimension_)};
  }
  std::span<const double> values_flat() const { return values_; }

  void require_compatible(const DiscreteDomain& domain) const;

 private:
  int order_;
  Index m_;
  int dimension_;
  std::vector<double> values_;
};

// A cycle of N domain indices; wraparound x_{N+i} = x_i is realized by
// modular indexing. Repetitions are allowed.
struct IndexCycle {
  int order;
  std::vector<Index> indices;

  IndexCycle(int order_in, std::vector<Index> indices_in, Index m);
  Index at(int pos) const {
    int k = pos % order;
    if (k < 0) k += order;
    return indices[static_cast<std::size_t>(k)];
  }
};

double dot(std::span<const double> a, std::span<const double> b);

// <u, x - y> accumulated left-to-right over coordinates.
double dot_diff(std::span<const double> u, std::span<const double> x,
                std::span<const double> y);

}  // namespace cymono::core
