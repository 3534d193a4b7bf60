#include "budgetreg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace budgetreg {

namespace {

void require_moments(std::span<const double> moments) {
  if (moments.empty()) throw std::invalid_argument("zero dimension");
  bool any_positive = false;
  for (double m : moments) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("degenerate moments");
    any_positive = any_positive || m > 0.0;
  }
  if (!any_positive) throw std::invalid_argument("degenerate moments");
}

}  // namespace

AttributeDistribution AttributeDistribution::from_weights(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("invalid weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("invalid weights");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("invalid weights");

  AttributeDistribution dist;
  dist.probabilities_.resize(weights.size());
  dist.cumulative_.resize(weights.size());
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    dist.probabilities_[i] = weights[i] / total;
    running += dist.probabilities_[i];
    dist.cumulative_[i] = running;
    if (weights[i] > 0.0) last_positive = i;
  }
  // Pin the tail to exactly 1 so every u in [0, 1) lands on a positive entry.
  for (std::size_t i = last_positive; i < weights.size(); ++i) dist.cumulative_[i] = 1.0;
  return dist;
}

AttributeDistribution AttributeDistribution::uniform(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("zero dimension");
  const std::vector<double> ones(dim, 1.0);
  return from_weights(ones);
}

std::size_t AttributeDistribution::sample(double u) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return cumulative_.size() - 1;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

AttributeDistribution AttributeDistribution::with_floor(double floor) const {
  if (floor == 0.0) return *this;
  const double d = static_cast<double>(size());
  if (floor < 0.0 || d * floor > 1.0 + kBallTolerance) {
    throw std::invalid_argument("probability floor must lie in [0, 1/d]");
  }
  std::vector<double> mixed(size());
  for (std::size_t i = 0; i < size(); ++i) {
    mixed[i] = (1.0 - d * floor) * probabilities_[i] + floor;
  }
  return from_weights(mixed);
}

AttributeDistribution ridge_optimal_q(std::span<const double> moments) {
  require_moments(moments);
  std::vector<double> roots(moments.size());
  std::transform(moments.begin(), moments.end(), roots.begin(),
                 [](double m) { return std::sqrt(m); });
  return AttributeDistribution::from_weights(roots);
}

AttributeDistribution lasso_optimal_q(std::span<const double> moments) {
  require_moments(moments);
  return AttributeDistribution::from_weights(moments);
}

AttributeDistribution inner_product_p(std::span<const double> w, Regime regime) {
  if (w.empty()) throw std::invalid_argument("zero dimension");
  std::vector<double> weights(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    weights[j] = regime == Regime::l2 ? w[j] * w[j] : std::abs(w[j]);
  }
  if (std::all_of(weights.begin(), weights.end(), [](double v) { return v == 0.0; })) {
    throw std::invalid_argument("zero weight vector");
  }
  return AttributeDistribution::from_weights(weights);
}

AttributeDistribution improved_inner_product_p(std::span<const double> w,
                                               std::span<const double> moments,
                                               Regime regime) {
  if (w.size() != moments.size()) {
    throw std::invalid_argument("improved_inner_product_p: dimension mismatch");
  }
  std::vector<double> weights(w.size());
  double total = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    weights[j] = std::sqrt(w[j] * w[j] * std::max(moments[j], 0.0));
    total += weights[j];
  }
  if (!(total > 0.0)) return inner_product_p(w, regime);
  return AttributeDistribution::from_weights(weights);
}

std::optional<AttributeDistribution> make_inner_product_p(std::span<const double> w,
                                                          Regime regime,
                                                          InnerProductMode mode,
                                                          std::span<const double> moments,
                                                          double floor) {
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
    return std::nullopt;
  }
  AttributeDistribution p = mode == InnerProductMode::improved && !moments.empty()
                                ? improved_inner_product_p(w, moments, regime)
                                : inner_product_p(w, regime);
  if (floor > 0.0) p = p.with_floor(floor);
  return p;
}

}  // namespace budgetreg
