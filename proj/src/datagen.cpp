#include "budgetreg/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "budgetreg/rng.hpp"

namespace budgetreg {

std::vector<double> power_law_means(std::size_t dim, double alpha, Regime regime) {
  if (dim == 0) throw std::invalid_argument("zero dimension");
  if (alpha > 0.0) throw std::invalid_argument("alpha must be <= 0");
  std::vector<double> u(dim);
  for (std::size_t i = 0; i < dim; ++i) u[i] = std::pow(static_cast<double>(i + 1), alpha);
  const double length = norm(u, regime == Regime::l2 ? NormKind::two : NormKind::inf);
  const double scale = 1.0 / std::max(1.0, length);
  for (double& v : u) v *= scale;
  return u;
}

std::vector<double> random_target_weights(std::size_t dim, Regime regime, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(dim);
  for (double& v : w) {
    const double u = rng.uniform();
    if (regime == Regime::l2) {
      v = u < 0.5 ? 1.0 : -1.0;
    } else {
      v = u < 0.15 ? 1.0 : (u < 0.30 ? -1.0 : 0.0);
    }
  }
  return w;
}

Dataset generate_dataset(std::span<const double> u, std::span<const double> w_star,
                         std::size_t m, Regime regime, std::uint64_t seed) {
  if (u.empty()) throw std::invalid_argument("zero dimension");
  if (u.size() != w_star.size()) throw std::invalid_argument("means / weights dimension mismatch");
  for (double mean : u) {
    if (!(mean >= 0.0 && mean <= 1.0)) throw std::invalid_argument("means must lie in [0, 1]");
  }
  Rng rng(seed);
  Dataset dataset;
  dataset.dim = u.size();
  dataset.regime = regime;
  dataset.examples.resize(m);
  for (Example& ex : dataset.examples) {
    ex.x.resize(u.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      ex.x[i] = rng.bernoulli(u[i]) ? 1.0 : 0.0;
      sq += ex.x[i];
    }
    if (regime == Regime::l2 && sq > 1.0) {
      const double scale = 1.0 / std::sqrt(sq);
      for (double& v : ex.x) v *= scale;
    }
    ex.y = dot(w_star, ex.x);
  }
  return dataset;
}

SyntheticData generate_synthetic(std::size_t dim, double alpha, Regime regime, std::size_t m,
                                 std::uint64_t seed) {
  SyntheticData out;
  out.seed = seed;
  out.alpha = alpha;
  out.means = power_law_means(dim, alpha, regime);
  out.target_weights = random_target_weights(dim, regime, derive_seed(seed, "target_weights"));
  out.dataset = generate_dataset(out.means, out.target_weights, m, regime,
                                 derive_seed(seed, "examples"));
  return out;
}

double improvement_ratio(std::span<const double> moments, Regime regime) {
  if (moments.empty()) throw std::invalid_argument("zero dimension");
  const double l1 = norm(moments, NormKind::one);
  if (!(l1 > 0.0)) throw std::invalid_argument("degenerate moments");
  const double d = static_cast<double>(moments.size());
  if (regime == Regime::l2) return norm(moments, NormKind::half) / (d * l1);
  return l1 / (d * norm(moments, NormKind::inf));
}

MomentSummary summarize_moments(std::span<const double> moments) {
  MomentSummary s;
  s.dim = moments.size();
  s.half_norm = norm(moments, NormKind::half);
  s.l1 = norm(moments, NormKind::one);
  s.linf = norm(moments, NormKind::inf);
  s.rho_ridge = improvement_ratio(moments, Regime::l2);
  s.rho_lasso = improvement_ratio(moments, Regime::linf);
  return s;
}

}  // namespace budgetreg
