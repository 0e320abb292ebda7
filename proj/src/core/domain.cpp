#include "cymono/core/domain.hpp"

#include <cmath>
#include <string>

namespace cymono::core {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (const double v : values) {
    if (!std::isfinite(v)) throw InvalidInputError(std::string(what) + " contains a non-finite entry");
  }
}

}  // namespace

DiscreteDomain::DiscreteDomain(int dimension, std::vector<double> points_flat,
                               std::vector<double> weights)
    : dimension_(dimension), points_(std::move(points_flat)), weights_(std::move(weights)) {
  if (dimension_ < 1) throw InvalidInputError("dimension must be >= 1");
  if (points_.empty() || points_.size() % static_cast<std::size_t>(dimension_) != 0)
    throw InvalidInputError("points array is not an m x d block");
  m_ = static_cast<Index>(points_.size()) / dimension_;
  require_finite(points_, "points");

  for (Index i = 0; i < m_; ++i) {
    for (Index j = i + 1; j < m_; ++j) {
      bool equal = true;
      for (int k = 0; k < dimension_; ++k) {
        if (points_[static_cast<std::size_t>(i * dimension_ + k)] !=
            points_[static_cast<std::size_t>(j * dimension_ + k)]) {
          equal = false;
          break;
        }
      }
      if (equal)
        throw InvalidInputError("points " + std::to_string(i) + " and " + std::to_string(j) +
                                " coincide");
    }
  }

  if (weights_.empty()) {
    weights_.assign(static_cast<std::size_t>(m_), 1.0 / static_cast<double>(m_));
    uniform_ = true;
  } else {
    if (static_cast<Index>(weights_.size()) != m_)
      throw InvalidInputError("weights size does not match point count");
    require_finite(weights_, "weights");
    double total = 0.0;
    for (const double w : weights_) {
      if (w < 0.0) throw InvalidInputError("weights must be nonnegative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw InvalidInputError("weights must sum to 1 (got " + std::to_string(total) + ")");
    uniform_ = true;
    const double u = 1.0 / static_cast<double>(m_);
    for (const double w : weights_) {
      if (std::abs(w - u) > 1e-12) {
        uniform_ = false;
        break;
      }
    }
  }
}

bool DiscreteDomain::regular_grid_1d(double* spacing) const {
  if (dimension_ != 1 || m_ < 3) return false;
  // Points must be sorted and equally spaced.
  const double h = points_[1] - points_[0];
  if (h <= 0.0) return false;
  for (Index i = 1; i + 1 < m_; ++i) {
    const double step = points_[static_cast<std::size_t>(i + 1)] - points_[static_cast<std::size_t>(i)];
    if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(h))) return false;
  }
  if (spacing != nullptr) *spacing = h;
  return true;
}

FieldTuple::FieldTuple(int order, Index m, int dimension, std::vector<double> values_flat)
    : order_(order), m_(m), dimension_(dimension), values_(std::move(values_flat)) {
  if (order_ < 2) throw InvalidInputError("field tuple order must be >= 2");
  if (m_ < 1 || dimension_ < 1) throw InvalidInputError("field tuple shape invalid");
  const std::size_t expected =
      static_cast<std::size_t>(order_ - 1) * static_cast<std::size_t>(m_) *
      static_cast<std::size_t>(dimension_);
  if (values_.size() != expected)
    throw InvalidInputError("field values are not an (N-1) x m x d block");
  require_finite(values_, "field values");
}

FieldTuple FieldTuple::zeros(int order, Index m, int dimension) {
  return FieldTuple(order, m, dimension,
                    std::vector<double>(static_cast<std::size_t>(order - 1) *
                                            static_cast<std::size_t>(m) *
                                            static_cast<std::size_t>(dimension),
                                        0.0));
}

void FieldTuple::require_compatible(const DiscreteDomain& domain) const {
  if (domain.size() != m_ || domain.dimension() != dimension_)
    throw InvalidInputError("field tuple shape does not match the domain");
}

IndexCycle::IndexCycle(int order_in, std::vector<Index> indices_in, Index m)
    : order(order_in), indices(std::move(indices_in)) {
  if (order < 2) throw InvalidInputError("cycle order must be >= 2");
  if (static_cast<int>(indices.size()) != order)
    throw InvalidInputError("cycle length must equal its order");
  for (const Index i : indices) {
    if (i < 0 || i >= m) throw InvalidInputError("cycle index out of range");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double dot_diff(std::span<const double> u, std::span<const double> x,
                std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * (x[k] - y[k]);
  return s;
}

}  // namespace cymono::core
