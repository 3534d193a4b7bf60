#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "budgetreg/core.hpp"

namespace budgetreg {

/// u_i = i^alpha (1-based i), scaled into the unit ball of the regime.
/// Throws std::invalid_argument for alpha > 0.
std::vector<double> power_law_means(std::size_t dim, double alpha, Regime regime);

/// l2: i.i.d. +-1. linf: +1 and -1 with probability 0.15 each, else 0.
std::vector<double> random_target_weights(std::size_t dim, Regime regime, std::uint64_t seed);

/// Independent binary attributes with means u and noiseless targets
/// y = <w*, x>. In the l2 regime each realized vector is rescaled by
/// 1 / max(1, ||x||_2) before computing y.
Dataset generate_dataset(std::span<const double> u, std::span<const double> w_star,
                         std::size_t m, Regime regime, std::uint64_t seed);

struct SyntheticData {
  std::vector<double> means;
  std::vector<double> target_weights;
  Dataset dataset;
  std::uint64_t seed = 0;
  double alpha = 0.0;
};

/// Means, target weights and examples come from separate seed streams, so
/// changing m leaves w* untouched.
SyntheticData generate_synthetic(std::size_t dim, double alpha, Regime regime, std::size_t m,
                                 std::uint64_t seed);

/// l2 (ridge):  ||E[x^2]||_{1/2} / (d * sum_i E[x_i^2])
/// linf (lasso): ||E[x^2]||_1 / (d * ||E[x^2]||_inf)
double improvement_ratio(std::span<const double> moments, Regime regime);

struct MomentSummary {
  std::size_t dim = 0;
  double half_norm = 0.0;
  double l1 = 0.0;
  double linf = 0.0;
  double rho_ridge = 0.0;
  double rho_lasso = 0.0;
};

MomentSummary summarize_moments(std::span<const double> moments);

}  // namespace budgetreg
