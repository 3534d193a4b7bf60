#include "budgetreg/estimator.hpp"

#include <stdexcept>

namespace budgetreg {

std::vector<double> SparseEstimate::dense() const {
  std::vector<double> out(dim, 0.0);
  for (const auto& [index, value] : entries) out[index] += value;
  return out;
}

double SparseEstimate::squared_norm() const {
  double sum = 0.0;
  for (const auto& entry : entries) sum += entry.second * entry.second;
  return sum;
}

std::vector<double> GradientEstimate::dense() const {
  std::vector<double> out = point.dense();
  for (double& value : out) value *= phi;
  return out;
}

SparseEstimate estimate_point(std::span<const double> x, const AttributeDistribution& q,
                              std::span<const double> draws,
                              const PointDrawObserver& observer) {
  if (draws.empty()) throw std::invalid_argument("estimate_point: k must be at least 1");
  if (q.size() != x.size()) throw std::invalid_argument("estimate_point: dimension mismatch");
  SparseEstimate estimate;
  estimate.dim = x.size();
  estimate.entries.reserve(draws.size());
  const double inv_k = 1.0 / static_cast<double>(draws.size());
  for (double u : draws) {
    const std::size_t i = q.sample(u);
    const double observed = x[i];
    if (observer) observer(i, observed);
    const double contribution = inv_k * observed / q.probability(i);
    auto it = estimate.entries.begin();
    while (it != estimate.entries.end() && it->first != i) ++it;
    if (it == estimate.entries.end()) {
      estimate.entries.emplace_back(i, contribution);
    } else {
      it->second += contribution;
    }
  }
  return estimate;
}

InnerProductEstimate estimate_inner_product(std::span<const double> x, double y,
                                            std::span<const double> w,
                                            const std::optional<AttributeDistribution>& p,
                                            std::span<const double> draws) {
  if (!p) return {-y, 0};
  if (draws.empty()) throw std::invalid_argument("estimate_inner_product: no draws");
  double sum = 0.0;
  for (double u : draws) {
    const std::size_t j = p->sample(u);
    sum += w[j] / p->probability(j) * x[j];
  }
  return {sum / static_cast<double>(draws.size()) - y, draws.size()};
}

GradientEstimate gradient_estimate(const Example& example, std::span<const double> w,
                                   const AttributeDistribution& q,
                                   const std::optional<AttributeDistribution>& p,
                                   std::span<const double> point_draws,
                                   std::span<const double> inner_draws,
                                   const PointDrawObserver& observer) {
  GradientEstimate g;
  g.point = estimate_point(example.x, q, point_draws, observer);
  const InnerProductEstimate inner =
      estimate_inner_product(example.x, example.y, w, p, inner_draws);
  g.phi = inner.phi;
  g.attributes_consumed = point_draws.size() + inner.consumed;
  return g;
}

}  // namespace budgetreg
