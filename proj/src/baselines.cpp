#include "budgetreg/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "budgetreg/estimator.hpp"
#include "budgetreg/lasso.hpp"
#include "budgetreg/ridge.hpp"
#include "budgetreg/rng.hpp"

namespace budgetreg {

namespace {

std::size_t dimension_of(std::span<const Example> examples) {
  if (examples.empty()) throw std::invalid_argument("empty dataset");
  return examples.front().x.size();
}

std::vector<double> risk_gradient(std::span<const Example> examples, std::span<const double> w) {
  std::vector<double> g(w.size(), 0.0);
  for (const Example& ex : examples) {
    const double residual = dot(w, ex.x) - ex.y;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += residual * ex.x[i];
  }
  const double inv_m = 1.0 / static_cast<double>(examples.size());
  for (double& v : g) v *= inv_m;
  return g;
}

// Largest eigenvalue of (1/m) X^T X by power iteration.
double curvature_estimate(std::span<const Example> examples, std::size_t dim) {
  std::vector<double> v(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  double lambda = 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<double> next(dim, 0.0);
    for (const Example& ex : examples) {
      const double proj = dot(v, ex.x);
      for (std::size_t i = 0; i < dim; ++i) next[i] += proj * ex.x[i];
    }
    double length = 0.0;
    for (double& value : next) {
      value /= static_cast<double>(examples.size());
      length += value * value;
    }
    length = std::sqrt(length);
    if (length == 0.0) return 0.0;
    lambda = length;
    for (std::size_t i = 0; i < dim; ++i) v[i] = next[i] / length;
  }
  return lambda;
}

std::vector<double> project(std::span<const double> v, double bound, Regime regime) {
  return regime == Regime::l2 ? project_l2_ball(v, bound) : project_l1_ball(v, bound);
}

SolverResult average_result(const std::vector<double>& sum_w, std::size_t steps,
                            std::vector<double> last, double bound, Regime regime,
                            std::size_t consumed) {
  SolverResult result;
  result.predictor.norm_bound = bound;
  result.predictor.regime = regime;
  result.predictor.weights = sum_w;
  for (double& v : result.predictor.weights) v /= static_cast<double>(steps);
  result.last_iterate = std::move(last);
  result.attributes_consumed = consumed;
  result.attributes_read = consumed;
  result.steps = steps;
  return result;
}

}  // namespace

SolverResult online_ridge_full(std::span<const Example> examples, double bound, double eta,
                               std::span<const double> initial_w) {
  const std::size_t dim = dimension_of(examples);
  std::vector<double> w = initial_w.empty()
                              ? default_ridge_start(dim, bound)
                              : project_l2_ball(initial_w, bound);
  std::vector<double> sum_w(dim, 0.0);
  for (const Example& ex : examples) {
    for (std::size_t i = 0; i < dim; ++i) sum_w[i] += w[i];
    const double residual = dot(w, ex.x) - ex.y;
    for (std::size_t i = 0; i < dim; ++i) w[i] -= eta * residual * ex.x[i];
    project_l2_ball_inplace(w, bound);
  }
  return average_result(sum_w, examples.size(), w, bound, Regime::l2, examples.size() * dim);
}

SolverResult online_lasso_full(std::span<const Example> examples, double bound, double eta) {
  const std::size_t dim = dimension_of(examples);
  EGState state = make_eg_state(dim);
  const double limit = 1.0 / eta;
  for (const Example& ex : examples) {
    const std::vector<double> w = eg_weights(state, bound);
    for (std::size_t i = 0; i < dim; ++i) state.sum_w[i] += w[i];
    const double residual = dot(w, ex.x) - ex.y;
    for (std::size_t i = 0; i < dim; ++i) {
      if (ex.x[i] == 0.0) continue;
      const double clipped = clip(residual * ex.x[i], limit);
      state.z_plus[i] *= std::exp(-eta * clipped);
      state.z_minus[i] *= std::exp(eta * clipped);
    }
    renormalize_eg(state);
    ++state.steps;
  }
  state.attributes_consumed = examples.size() * dim;
  state.attributes_read = state.attributes_consumed;
  return finish_eg(state, bound);
}

double empirical_risk(std::span<const Example> examples, std::span<const double> w) {
  if (examples.empty()) throw std::invalid_argument("empty dataset");
  double total = 0.0;
  for (const Example& ex : examples) total += squared_loss(dot(w, ex.x), ex.y);
  return total / static_cast<double>(examples.size());
}

ErmResult offline_erm(std::span<const Example> examples, double bound, Regime regime,
                      const ErmOptions& options) {
  if (options.passes == 0) throw std::invalid_argument("passes must be at least 1");
  if (bound < 0.0) throw std::invalid_argument("B must be nonnegative");
  const std::size_t dim = dimension_of(examples);
  ErmResult out;
  std::vector<double> w(dim, 0.0);
  double risk = empirical_risk(examples, w);
  out.risk_history.push_back(risk);

  const double curvature = curvature_estimate(examples, dim);
  double step = curvature > 0.0 ? 1.0 / curvature : 1.0;
  std::size_t passes = 0;
  while (bound > 0.0 && curvature > 0.0 && passes < options.passes) {
    const std::vector<double> g = risk_gradient(examples, w);
    ++passes;
    std::vector<double> candidate;
    double candidate_risk = 0.0;
    double move_sq = 0.0;
    while (true) {
      std::vector<double> trial(dim);
      for (std::size_t i = 0; i < dim; ++i) trial[i] = w[i] - step * g[i];
      candidate = project(trial, bound, regime);
      candidate_risk = empirical_risk(examples, candidate);
      ++passes;
      double linear = 0.0;
      move_sq = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double delta = candidate[i] - w[i];
        linear += g[i] * delta;
        move_sq += delta * delta;
      }
      // Sufficient decrease for an L-smooth objective with L = 1/step.
      if (candidate_risk <= risk + linear + move_sq / (2.0 * step) + 1e-15) break;
      step *= 0.5;
    }
    if (candidate_risk > risk) break;
    w = std::move(candidate);
    risk = candidate_risk;
    out.risk_history.push_back(risk);
    if (std::sqrt(move_sq) / step <= options.tolerance) break;
  }

  out.passes_used = passes;
  out.result.predictor.weights = w;
  out.result.predictor.norm_bound = bound;
  out.result.predictor.regime = regime;
  out.result.last_iterate = w;
  out.result.attributes_consumed = examples.size() * dim;
  out.result.attributes_read = out.result.attributes_consumed;
  out.result.steps = passes;
  return out;
}

SolverResult adagrad_variant(AdagradBase base, std::span<const Example> examples,
                             const AdagradConfig& config, std::uint64_t seed,
                             const AccumulatorObserver& observer) {
  const std::size_t dim = dimension_of(examples);
  const SolverConfig& solver = config.solver;
  if (!(config.eta0 > 0.0)) throw std::invalid_argument("eta0 must be positive");
  if (!(config.stabilizer > 0.0)) throw std::invalid_argument("stabilizer must be positive");
  if (base != AdagradBase::online_full && (solver.k == 0 || solver.inner_draws == 0)) {
    throw std::invalid_argument("k and inner_draws must be at least 1");
  }
  std::vector<double> accum(dim, 0.0);
  auto rate = [&](std::size_t i) { return config.eta0 / std::sqrt(config.stabilizer + accum[i]); };

  if (base == AdagradBase::online_full) {
    std::vector<double> w = solver.initial_w.empty() ? default_ridge_start(dim, solver.bound)
                                                     : project_l2_ball(solver.initial_w, solver.bound);
    std::vector<double> sum_w(dim, 0.0);
    for (const Example& ex : examples) {
      for (std::size_t i = 0; i < dim; ++i) sum_w[i] += w[i];
      const double residual = dot(w, ex.x) - ex.y;
      for (std::size_t i = 0; i < dim; ++i) {
        const double g = residual * ex.x[i];
        if (g == 0.0) continue;
        accum[i] += g * g;
        w[i] -= rate(i) * g;
      }
      project_l2_ball_inplace(w, solver.bound);
      if (observer) observer(accum);
    }
    return average_result(sum_w, examples.size(), w, solver.bound, Regime::l2,
                          examples.size() * dim);
  }

  if (solver.q.size() != dim) throw std::invalid_argument("q dimension mismatch");
  Rng rng(seed);
  std::vector<double> point_draws(solver.k);
  std::vector<double> inner_draws(solver.inner_draws);
  auto draw = [&] {
    for (double& u : point_draws) u = rng.uniform();
    for (double& u : inner_draws) u = rng.uniform();
  };

  if (base == AdagradBase::gaerr) {
    RidgeState state = make_ridge_state(dim, solver);
    for (const Example& ex : examples) {
      draw();
      const auto p = make_inner_product_p(state.w, Regime::l2, solver.p_mode, solver.moments,
                                          solver.p_floor);
      const GradientEstimate g =
          gradient_estimate(ex, state.w, solver.q, p, point_draws, inner_draws);
      for (std::size_t i = 0; i < dim; ++i) state.sum_w[i] += state.w[i];
      for (const auto& [index, value] : g.point.entries) {
        const double gi = g.phi * value;
        if (gi == 0.0) continue;
        accum[index] += gi * gi;
        state.w[index] -= rate(index) * gi;
      }
      project_l2_ball_inplace(state.w, solver.bound);
      ++state.steps;
      state.attributes_consumed += solver.k + solver.inner_draws;
      state.attributes_read += g.attributes_consumed;
      if (observer) observer(accum);
    }
    return finish_ridge(state, solver);
  }

  EGState state = solver.initial_w.empty() ? make_eg_state(dim)
                                           : eg_state_from_weights(solver.initial_w, solver.bound);
  for (const Example& ex : examples) {
    draw();
    const std::vector<double> w = eg_weights(state, solver.bound);
    for (std::size_t i = 0; i < dim; ++i) state.sum_w[i] += w[i];
    const auto p =
        make_inner_product_p(w, Regime::linf, solver.p_mode, solver.moments, solver.p_floor);
    const GradientEstimate g = gradient_estimate(ex, w, solver.q, p, point_draws, inner_draws);
    for (const auto& [index, value] : g.point.entries) {
      const double gi = g.phi * value;
      if (gi == 0.0) continue;
      accum[index] += gi * gi;
      const double eta = rate(index);
      const double clipped = clip(gi, 1.0 / eta);
      state.z_plus[index] *= std::exp(-eta * clipped);
      state.z_minus[index] *= std::exp(eta * clipped);
    }
    renormalize_eg(state);
    ++state.steps;
    state.attributes_consumed += solver.k + solver.inner_draws;
    state.attributes_read += g.attributes_consumed;
    if (observer) observer(accum);
  }
  return finish_eg(state, solver.bound);
}

}  // namespace budgetreg
