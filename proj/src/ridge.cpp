#include "budgetreg/ridge.hpp"

#include <cmath>
#include <stdexcept>

namespace budgetreg {

namespace {

void check_config(const SolverConfig& config, std::size_t dim) {
  if (config.k == 0) throw std::invalid_argument("k must be at least 1");
  if (config.inner_draws == 0) throw std::invalid_argument("inner_draws must be at least 1");
  if (!(config.eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(config.bound > 0.0)) throw std::invalid_argument("B must be positive");
  if (config.q.size() != dim) throw std::invalid_argument("q dimension mismatch");
}

}  // namespace

std::vector<double> default_ridge_start(std::size_t dim, double bound) {
  if (dim == 0) throw std::invalid_argument("zero dimension");
  return std::vector<double>(dim, bound / (2.0 * std::sqrt(static_cast<double>(dim))));
}

RidgeState make_ridge_state(std::size_t dim, const SolverConfig& config) {
  RidgeState state;
  if (config.initial_w.empty()) {
    state.w = default_ridge_start(dim, config.bound);
  } else {
    if (config.initial_w.size() != dim) throw std::invalid_argument("initial_w dimension mismatch");
    state.w = project_l2_ball(config.initial_w, config.bound);
  }
  state.sum_w.assign(dim, 0.0);
  return state;
}

void apply_ridge_update(RidgeState& state, const GradientEstimate& g, const SolverConfig& config) {
  for (std::size_t i = 0; i < state.w.size(); ++i) state.sum_w[i] += state.w[i];
  const double scale = config.eta * g.phi;
  for (const auto& [index, value] : g.point.entries) state.w[index] -= scale * value;
  project_l2_ball_inplace(state.w, config.bound);
  ++state.steps;
  state.attributes_consumed += config.k + config.inner_draws;
  state.attributes_read += g.attributes_consumed;
}

void gaerr_step(RidgeState& state, const Example& example, const SolverConfig& config,
                Rng& rng, const PointDrawObserver& observer) {
  std::vector<double> point_draws(config.k);
  for (double& u : point_draws) u = rng.uniform();
  std::vector<double> inner_draws(config.inner_draws);
  for (double& u : inner_draws) u = rng.uniform();

  const auto p = make_inner_product_p(state.w, Regime::l2, config.p_mode, config.moments,
                                      config.p_floor);
  const GradientEstimate g =
      gradient_estimate(example, state.w, config.q, p, point_draws, inner_draws, observer);
  apply_ridge_update(state, g, config);
}

SolverResult finish_ridge(const RidgeState& state, const SolverConfig& config) {
  SolverResult result;
  result.predictor.norm_bound = config.bound;
  result.predictor.regime = Regime::l2;
  result.predictor.weights.assign(state.w.size(), 0.0);
  if (state.steps > 0) {
    const double inv = 1.0 / static_cast<double>(state.steps);
    for (std::size_t i = 0; i < state.w.size(); ++i) {
      result.predictor.weights[i] = state.sum_w[i] * inv;
    }
  } else {
    result.predictor.weights = state.w;
  }
  result.last_iterate = state.w;
  result.attributes_consumed = state.attributes_consumed;
  result.attributes_read = state.attributes_read;
  result.steps = state.steps;
  return result;
}

SolverResult run_gaerr(std::span<const Example> examples, const SolverConfig& config,
                       Rng& rng, RidgeState& state, const PointDrawObserver& observer) {
  if (examples.empty()) throw std::invalid_argument("empty dataset");
  check_config(config, state.w.size());
  for (const Example& example : examples) gaerr_step(state, example, config, rng, observer);
  return finish_ridge(state, config);
}

SolverResult run_gaerr(std::span<const Example> examples, const SolverConfig& config,
                       std::uint64_t seed) {
  if (examples.empty()) throw std::invalid_argument("empty dataset");
  Rng rng(seed);
  RidgeState state = make_ridge_state(examples.front().x.size(), config);
  return run_gaerr(examples, config, rng, state);
}

AttributeDistribution aerr_q(std::size_t dim) { return AttributeDistribution::uniform(dim); }

double aerr_eta(std::size_t m, std::size_t k, std::size_t dim, double bound) {
  if (m == 0 || k == 0 || dim == 0) throw std::invalid_argument("aerr_eta: m, k, d must be >= 1");
  const double gradient_bound =
      bound * std::sqrt(8.0 * static_cast<double>(dim) / static_cast<double>(k));
  return 2.0 * bound / (gradient_bound * std::sqrt(static_cast<double>(m)));
}

double ridge_eta_known_moments(std::size_t m, std::size_t k, double half_norm) {
  if (m == 0 || k == 0) throw std::invalid_argument("ridge_eta_known_moments: m, k must be >= 1");
  return 1.0 / std::sqrt(static_cast<double>(m) *
                         (half_norm / static_cast<double>(k) + 1.0));
}

}  // namespace budgetreg
