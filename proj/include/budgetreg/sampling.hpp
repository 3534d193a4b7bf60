#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "budgetreg/core.hpp"

namespace budgetreg {

/// Categorical distribution over attribute indices with an inverse-CDF table.
/// Immutable once built. Indices are 0-based.
class AttributeDistribution {
 public:
  /// Normalizes nonnegative weights. Throws std::invalid_argument("invalid
  /// weights") when a weight is negative or non-finite, or all are zero.
  static AttributeDistribution from_weights(std::span<const double> weights);
  static AttributeDistribution uniform(std::size_t dim);

  std::size_t size() const { return probabilities_.size(); }
  double probability(std::size_t i) const { return probabilities_[i]; }
  const std::vector<double>& probabilities() const { return probabilities_; }
  const std::vector<double>& cumulative() const { return cumulative_; }

  /// Smallest index whose cumulative mass exceeds u, for u in [0, 1).
  /// Zero-probability indices are never returned.
  std::size_t sample(double u) const;

  /// Mixes every coordinate toward a floor: (1 - d*floor) * q + floor.
  /// floor = 0 returns a copy. Requires d * floor <= 1.
  AttributeDistribution with_floor(double floor) const;

 private:
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

/// How the single inner-product attribute is chosen.
enum class InnerProductMode {
  standard,  ///< p_j = w_j^2/||w||_2^2 (ridge) or |w_j|/||w||_1 (lasso)
  improved,  ///< p_j proportional to |w_j| sqrt(E[x_j^2])
};

/// q_i = sqrt(m_i) / sum_j sqrt(m_j). Minimizes sum_i m_i / q_i.
AttributeDistribution ridge_optimal_q(std::span<const double> moments);

/// q_i = m_i / sum_j m_j. Minimizes max_i m_i / q_i.
AttributeDistribution lasso_optimal_q(std::span<const double> moments);

/// Throws std::invalid_argument("zero weight vector") for w = 0.
AttributeDistribution inner_product_p(std::span<const double> w, Regime regime);

/// p_i = |w_i| sqrt(m_i) / sum_j |w_j| sqrt(m_j); falls back to
/// inner_product_p(w, regime) when that sum vanishes.
AttributeDistribution improved_inner_product_p(std::span<const double> w,
                                               std::span<const double> moments,
                                               Regime regime = Regime::l2);

/// Builds the inner-product distribution for the current iterate, or nullopt
/// when w = 0 (no observation is needed then).
std::optional<AttributeDistribution> make_inner_product_p(
    std::span<const double> w, Regime regime, InnerProductMode mode,
    std::span<const double> moments, double floor = 0.0);

}  // namespace budgetreg
