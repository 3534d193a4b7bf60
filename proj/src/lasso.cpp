#include "budgetreg/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "budgetreg/two_phase.hpp"

namespace budgetreg {

void renormalize_eg(EGState& state) {
  double largest = 0.0;
  for (double v : state.z_plus) largest = std::max(largest, v);
  for (double v : state.z_minus) largest = std::max(largest, v);
  if (largest <= kEgRenormalizeThreshold) return;
  const double inv = 1.0 / largest;
  const double tiny = std::numeric_limits<double>::min();
  for (double& v : state.z_plus) v = std::max(v * inv, tiny);
  for (double& v : state.z_minus) v = std::max(v * inv, tiny);
}

EGState make_eg_state(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("zero dimension");
  EGState state;
  state.z_plus.assign(dim, 1.0);
  state.z_minus.assign(dim, 1.0);
  state.sum_w.assign(dim, 0.0);
  return state;
}

EGState eg_state_from_weights(std::span<const double> w, double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("B must be positive");
  EGState state = make_eg_state(w.size());
  const double used = norm(w, NormKind::one) / bound;
  if (used > 1.0 + kBallTolerance) throw std::invalid_argument("warm start outside the L1 ball");
  // Spread the unused mass evenly so every entry stays positive.
  const double slack = std::max(1.0 - used, 1e-12) / (2.0 * static_cast<double>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) {
    state.z_plus[i] = std::max(w[i], 0.0) / bound + slack;
    state.z_minus[i] = std::max(-w[i], 0.0) / bound + slack;
  }
  return state;
}

std::vector<double> eg_weights(const EGState& state, double bound) {
  double total = 0.0;
  for (double v : state.z_plus) total += v;
  for (double v : state.z_minus) total += v;
  std::vector<double> w(state.z_plus.size());
  const double scale = bound / total;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (state.z_plus[i] - state.z_minus[i]) * scale;
  return w;
}

void apply_eg_update(EGState& state, const GradientEstimate& g, double eta) {
  const double limit = 1.0 / eta;
  // Duplicates are already merged, so each support coordinate appears once.
  for (const auto& [index, value] : g.point.entries) {
    const double clipped = clip(g.phi * value, limit);
    state.z_plus[index] *= std::exp(-eta * clipped);
    state.z_minus[index] *= std::exp(eta * clipped);
  }
  renormalize_eg(state);
}

void gaelr_step(EGState& state, const Example& example, const SolverConfig& config, Rng& rng,
                const PointDrawObserver& observer) {
  std::vector<double> point_draws(config.k);
  for (double& u : point_draws) u = rng.uniform();
  std::vector<double> inner_draws(config.inner_draws);
  for (double& u : inner_draws) u = rng.uniform();

  const std::vector<double> w = eg_weights(state, config.bound);
  for (std::size_t i = 0; i < w.size(); ++i) state.sum_w[i] += w[i];

  const auto p =
      make_inner_product_p(w, Regime::linf, config.p_mode, config.moments, config.p_floor);
  const GradientEstimate g =
      gradient_estimate(example, w, config.q, p, point_draws, inner_draws, observer);
  apply_eg_update(state, g, config.eta);
  ++state.steps;
  state.attributes_consumed += config.k + config.inner_draws;
  state.attributes_read += g.attributes_consumed;
}

SolverResult finish_eg(const EGState& state, double bound) {
  SolverResult result;
  result.predictor.norm_bound = bound;
  result.predictor.regime = Regime::linf;
  result.last_iterate = eg_weights(state, bound);
  if (state.steps > 0) {
    result.predictor.weights.resize(state.sum_w.size());
    const double inv = 1.0 / static_cast<double>(state.steps);
    for (std::size_t i = 0; i < state.sum_w.size(); ++i) {
      result.predictor.weights[i] = state.sum_w[i] * inv;
    }
  } else {
    result.predictor.weights = result.last_iterate;
  }
  result.attributes_consumed = state.attributes_consumed;
  result.attributes_read = state.attributes_read;
  result.steps = state.steps;
  return result;
}

SolverResult run_gaelr(std::span<const Example> examples, const SolverConfig& config, Rng& rng,
                       EGState& state, const PointDrawObserver& observer) {
  if (examples.empty()) throw std::invalid_argument("empty dataset");
  if (config.k == 0) throw std::invalid_argument("k must be at least 1");
  if (config.inner_draws == 0) throw std::invalid_argument("inner_draws must be at least 1");
  if (!(config.eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(config.bound > 0.0)) throw std::invalid_argument("B must be positive");
  if (config.q.size() != state.z_plus.size()) throw std::invalid_argument("q dimension mismatch");
  for (const Example& example : examples) gaelr_step(state, example, config, rng, observer);
  return finish_eg(state, config.bound);
}

SolverResult run_gaelr(std::span<const Example> examples, const SolverConfig& config,
                       std::uint64_t seed) {
  if (examples.empty()) throw std::invalid_argument("empty dataset");
  Rng rng(seed);
  EGState state = config.initial_w.empty() ? make_eg_state(examples.front().x.size())
                                           : eg_state_from_weights(config.initial_w, config.bound);
  return run_gaelr(examples, config, rng, state);
}

double aelr_eta(std::size_t m, std::size_t k, std::size_t dim, double bound) {
  if (m == 0 || k == 0 || dim == 0) throw std::invalid_argument("aelr_eta: m, k, d must be >= 1");
  const double gradient_bound =
      bound * std::sqrt(8.0 * static_cast<double>(dim) / static_cast<double>(k));
  const double eta = 2.0 * bound / (gradient_bound * std::sqrt(static_cast<double>(m)));
  return std::min(eta, 1.0 / (2.0 * gradient_bound));
}

LassoStepSize lasso_eta_known_moments(double m, std::size_t k, std::size_t dim, double bound,
                                      double l1_moment) {
  if (!(m > 0.0) || k == 0 || dim == 0) {
    throw std::invalid_argument("lasso_eta_known_moments: m, k, d must be positive");
  }
  const double log2d = std::log(2.0 * static_cast<double>(dim));
  LassoStepSize out;
  out.eta = std::sqrt(log2d / (5.0 * m * (l1_moment / static_cast<double>(k) + 1.0))) /
            (2.0 * bound);
  out.below_min_examples = m < log2d;
  return out;
}

double lasso_eta_two_phase(std::size_t m1, double m2, std::size_t k, std::size_t dim,
                           double delta, double a_l1, double bound) {
  const double eps = smoothing_epsilon(dim, delta, k, m1, Regime::linf).epsilon;
  return lasso_eta_two_phase_eps(m2, k, dim, a_l1, bound, eps);
}

}  // namespace budgetreg
