#include "budgetreg/two_phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "budgetreg/lasso.hpp"
#include "budgetreg/ridge.hpp"

namespace budgetreg {

MomentTable::MomentTable(std::size_t dim) : counts(dim, 0), square_sums(dim, 0.0), A(dim, 0.0) {}

void MomentTable::record(std::size_t index, double value) {
  ++counts[index];
  square_sums[index] += value * value;
  A[index] = square_sums[index] / static_cast<double>(counts[index]);
  ++draws;
}

MomentTable estimate_moments(std::span<const Example> examples, std::size_t k, Rng& rng) {
  const std::size_t dim = examples.empty() ? 0 : examples.front().x.size();
  MomentTable table(dim);
  for (const Example& example : examples) {
    for (std::size_t r = 0; r < k + 1; ++r) {
      const std::size_t i = rng.below(dim);
      table.record(i, example.x[i]);
    }
    ++table.m1;
  }
  return table;
}

MomentTable estimate_moments(std::span<const Example> examples, std::size_t k,
                             std::uint64_t seed) {
  Rng rng(seed);
  return estimate_moments(examples, k, rng);
}

SmoothingParams smoothing_epsilon(std::size_t dim, double delta, std::size_t k, std::size_t m1,
                                  Regime regime) {
  if (dim == 0) throw std::invalid_argument("zero dimension");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  SmoothingParams out;
  out.delta = delta;
  out.capped = regime == Regime::linf;
  if (m1 == 0) {
    if (regime == Regime::l2) throw std::invalid_argument("no phase-1 data");
    out.epsilon = 1.0;
    return out;
  }
  const double d = static_cast<double>(dim);
  out.epsilon = d * std::log(2.0 * d / delta) /
                (static_cast<double>(k + 1) * static_cast<double>(m1));
  if (out.capped) out.epsilon = std::min(out.epsilon, 1.0);
  return out;
}

AttributeDistribution smoothed_q(std::span<const double> A, double epsilon, Regime regime,
                                 double floor) {
  if (A.empty()) throw std::invalid_argument("zero dimension");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
  std::vector<double> weights(A.size());
  bool any_positive = false;
  for (std::size_t i = 0; i < A.size(); ++i) {
    const double shifted = A[i] + 13.0 * epsilon / 6.0;
    weights[i] = regime == Regime::l2 ? std::sqrt(shifted) : shifted;
    any_positive = any_positive || weights[i] > 0.0;
  }
  if (!any_positive) throw std::invalid_argument("degenerate smoothed distribution");
  return AttributeDistribution::from_weights(weights).with_floor(floor);
}

double estimate_half_norm(std::span<const double> A, double epsilon) {
  double root_sum = 0.0;
  for (double a : A) root_sum += std::sqrt(2.0 * a + 10.0 * epsilon / 3.0);
  return root_sum * root_sum;
}

double ridge_eta_two_phase(double m2, std::size_t k, std::size_t dim, double half_norm,
                           double epsilon) {
  if (!(m2 > 0.0) || k == 0 || dim == 0) {
    throw std::invalid_argument("ridge_eta_two_phase: m2, k, d must be positive");
  }
  const double kk = static_cast<double>(k);
  const double d = static_cast<double>(dim);
  const double worst_case = std::sqrt(kk / (6.0 * d * m2));
  if (std::isinf(epsilon)) return worst_case;
  const double denominator =
      m2 * (2.0 * half_norm +
            2.0 * std::sqrt(5.0 / 3.0) * d * std::sqrt(half_norm) * std::sqrt(epsilon) + kk);
  return std::max(worst_case, std::sqrt(kk / denominator));
}

double ridge_eta_two_phase(std::size_t m1, double m2, std::size_t k, std::size_t dim,
                           double delta, double half_norm) {
  const double epsilon = m1 == 0 ? std::numeric_limits<double>::infinity()
                                 : smoothing_epsilon(dim, delta, k, m1, Regime::l2).epsilon;
  return ridge_eta_two_phase(m2, k, dim, half_norm, epsilon);
}

double lasso_eta_two_phase_eps(double m2, std::size_t k, std::size_t dim, double a_l1,
                               double bound, double epsilon) {
  if (!(m2 > 0.0) || k == 0 || dim == 0) {
    throw std::invalid_argument("lasso_eta_two_phase: m2, k, d must be positive");
  }
  const double d = static_cast<double>(dim);
  const double kk = static_cast<double>(k);
  const double eps = std::min(epsilon, 1.0);
  return std::sqrt(kk * std::log(2.0 * d) /
                   (20.0 * bound * bound * m2 * (8.0 * a_l1 + 20.0 * d * eps + kk)));
}

TwoPhaseResult run_two_phase(std::span<const Example> examples, const TwoPhaseConfig& config,
                             std::uint64_t seed) {
  if (config.m2 == 0) throw std::invalid_argument("empty second phase");
  if (config.m1 + config.m2 > examples.size()) {
    throw std::invalid_argument("m1 + m2 exceeds the dataset size");
  }
  if (config.k == 0 || config.inner_draws == 0) {
    throw std::invalid_argument("k and inner_draws must be at least 1");
  }
  const std::size_t dim = examples.front().x.size();
  const std::size_t per_example = config.k + config.inner_draws;
  const std::size_t budget_minus_one = per_example - 1;
  const auto phase1 = examples.subspan(0, config.m1);
  const auto phase2 = examples.subspan(config.m1, config.m2);
  const bool ridge = config.regime == Regime::l2;

  TwoPhaseResult out;
  TwoPhaseDiagnostics& diag = out.diagnostics;
  diag.moments = MomentTable(dim);
  std::vector<double> warm_start;
  std::size_t phase1_reads = 0;

  Rng phase1_rng(derive_seed(seed, "phase1"));
  if (config.phase1_mode == PhaseOneMode::pure_estimation) {
    if (config.m1 > 0) diag.moments = estimate_moments(phase1, budget_minus_one, phase1_rng);
    phase1_reads = diag.moments.draws;
  } else if (config.m1 > 0) {
    SolverConfig uniform;
    uniform.bound = config.bound;
    uniform.k = config.k;
    uniform.inner_draws = config.inner_draws;
    uniform.q = aerr_q(dim);
    uniform.eta = config.phase1_eta.value_or(
        ridge ? aerr_eta(config.m1, config.k, dim, config.bound)
              : aelr_eta(config.m1, config.k, dim, config.bound));
    MomentTable& table = diag.moments;
    const PointDrawObserver observer = [&table](std::size_t i, double value) {
      table.record(i, value);
    };
    SolverResult first;
    if (ridge) {
      RidgeState state = make_ridge_state(dim, uniform);
      first = run_gaerr(phase1, uniform, phase1_rng, state, observer);
    } else {
      EGState state = make_eg_state(dim);
      first = run_gaelr(phase1, uniform, phase1_rng, state, observer);
    }
    table.m1 = config.m1;
    phase1_reads = first.attributes_read;
    if (norm(first.predictor.weights, NormKind::one) > 0.0) warm_start = first.predictor.weights;
  }
  diag.phase1_budget = config.m1 * per_example;

  diag.smoothing =
      smoothing_epsilon(dim, config.delta, budget_minus_one, config.m1, config.regime);
  diag.epsilon_for_q = config.epsilon_override.value_or(diag.smoothing.epsilon);
  const bool empty_table = std::all_of(diag.moments.A.begin(), diag.moments.A.end(),
                                       [](double a) { return a == 0.0; });
  if (empty_table && diag.epsilon_for_q == 0.0) {
    // Limit of the smoothed distribution as epsilon -> 0+.
    diag.q = AttributeDistribution::uniform(dim).with_floor(config.q_floor);
  } else {
    diag.q = smoothed_q(diag.moments.A, diag.epsilon_for_q, config.regime, config.q_floor);
  }
  diag.half_norm_estimate = estimate_half_norm(diag.moments.A, diag.smoothing.epsilon);

  const double m2 = static_cast<double>(config.m2);
  if (config.eta) {
    diag.eta = *config.eta;
  } else if (ridge) {
    diag.eta = ridge_eta_two_phase(m2, config.k, dim,
                                   config.known_half_norm.value_or(diag.half_norm_estimate),
                                   diag.smoothing.epsilon);
  } else {
    diag.eta = lasso_eta_two_phase_eps(m2, config.k, dim, norm(diag.moments.A, NormKind::one),
                                       config.bound, diag.smoothing.epsilon);
  }

  SolverConfig second;
  second.bound = config.bound;
  second.eta = diag.eta;
  second.k = config.k;
  second.inner_draws = config.inner_draws;
  second.q = diag.q;
  second.p_mode = config.p_mode;
  second.p_floor = config.q_floor;
  second.initial_w = warm_start;
  if (config.p_mode == InnerProductMode::improved) {
    second.moments.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      second.moments[i] = diag.moments.A[i] + 13.0 * diag.epsilon_for_q / 6.0;
    }
  }

  Rng phase2_rng(derive_seed(seed, "phase2"));
  if (ridge) {
    RidgeState state = make_ridge_state(dim, second);
    out.result = run_gaerr(phase2, second, phase2_rng, state);
  } else {
    EGState state = warm_start.empty() ? make_eg_state(dim)
                                       : eg_state_from_weights(warm_start, config.bound);
    out.result = run_gaelr(phase2, second, phase2_rng, state);
  }
  diag.phase2_budget = out.result.attributes_consumed;
  out.result.attributes_consumed += diag.phase1_budget;
  out.result.attributes_read += phase1_reads;
  out.result.steps += config.m1;
  return out;
}

}  // namespace budgetreg
