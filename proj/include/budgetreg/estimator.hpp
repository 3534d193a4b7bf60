#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "budgetreg/core.hpp"
#include "budgetreg/sampling.hpp"

namespace budgetreg {

/// Sparse point estimate x~ = (1/k) sum_r x[i_r] / q_{i_r} e_{i_r}.
/// Repeated indices are merged by summation.
struct SparseEstimate {
  std::size_t dim = 0;
  std::vector<std::pair<std::size_t, double>> entries;

  std::vector<double> dense() const;
  double squared_norm() const;
};

/// Unbiased gradient estimate g~ = phi~ * x~.
struct GradientEstimate {
  double phi = 0.0;
  SparseEstimate point;
  /// Attribute reads actually made: point draws plus inner-product draws
  /// (zero inner-product reads when w = 0).
  std::size_t attributes_consumed = 0;

  std::vector<double> dense() const;
};

struct InnerProductEstimate {
  double phi = 0.0;
  std::size_t consumed = 0;
};

/// Called with (index, observed value) for every point-estimation draw.
using PointDrawObserver = std::function<void(std::size_t, double)>;

/// One point-estimation draw per element of `draws` (uniforms in [0, 1)),
/// sampled with replacement from q.
SparseEstimate estimate_point(std::span<const double> x, const AttributeDistribution& q,
                              std::span<const double> draws,
                              const PointDrawObserver& observer = {});

/// phi~ = mean over draws of (w_j / p_j) x[j] - y. When p is empty (w = 0)
/// phi~ = -y exactly and nothing is read.
InnerProductEstimate estimate_inner_product(std::span<const double> x, double y,
                                            std::span<const double> w,
                                            const std::optional<AttributeDistribution>& p,
                                            std::span<const double> draws);

/// Combines the two estimators with disjoint draws.
GradientEstimate gradient_estimate(const Example& example, std::span<const double> w,
                                   const AttributeDistribution& q,
                                   const std::optional<AttributeDistribution>& p,
                                   std::span<const double> point_draws,
                                   std::span<const double> inner_draws,
                                   const PointDrawObserver& observer = {});

}  // namespace budgetreg
