#include "budgetreg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "budgetreg/baselines.hpp"
#include "budgetreg/datagen.hpp"
#include "budgetreg/ingest.hpp"
#include "budgetreg/lasso.hpp"
#include "budgetreg/ridge.hpp"
#include "budgetreg/rng.hpp"

namespace budgetreg {

namespace {

struct AlgorithmInfo {
  Algorithm algorithm;
  const char* name;
  Regime regime;
  bool budgeted;
};

constexpr AlgorithmInfo kAlgorithms[] = {
    {Algorithm::aerr, "aerr", Regime::l2, true},
    {Algorithm::ddaerr, "ddaerr", Regime::l2, true},
    {Algorithm::two_phase_ddaerr, "2p-ddaerr", Regime::l2, true},
    {Algorithm::aelr, "aelr", Regime::linf, true},
    {Algorithm::ddaelr, "ddaelr", Regime::linf, true},
    {Algorithm::two_phase_ddaelr, "2p-ddaelr", Regime::linf, true},
    {Algorithm::ogd_full, "ogd-full", Regime::l2, false},
    {Algorithm::eg_full, "eg-full", Regime::linf, false},
    {Algorithm::erm_ridge, "erm", Regime::l2, false},
    {Algorithm::erm_lasso, "erm-lasso", Regime::linf, false},
    {Algorithm::adagrad_ogd_full, "adagrad-ogd-full", Regime::l2, false},
    {Algorithm::adagrad_aerr, "adagrad-aerr", Regime::l2, true},
    {Algorithm::adagrad_ddaerr, "adagrad-ddaerr", Regime::l2, true},
    {Algorithm::adagrad_aelr, "adagrad-aelr", Regime::linf, true},
    {Algorithm::adagrad_ddaelr, "adagrad-ddaelr", Regime::linf, true},
};

const AlgorithmInfo& info(Algorithm algorithm) {
  for (const AlgorithmInfo& entry : kAlgorithms) {
    if (entry.algorithm == algorithm) return entry;
  }
  throw std::logic_error("unknown algorithm");
}

bool is_data_dependent(Algorithm a) {
  return a == Algorithm::ddaerr || a == Algorithm::ddaelr || a == Algorithm::adagrad_ddaerr ||
         a == Algorithm::adagrad_ddaelr || a == Algorithm::two_phase_ddaerr ||
         a == Algorithm::two_phase_ddaelr;
}

std::size_t phase_one_size(std::size_t m, double fraction) {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(m) * fraction - 1e-9));
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::vector<Example> gather(std::span<const Example> examples,
                            std::span<const std::size_t> indices) {
  std::vector<Example> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(examples[i]);
  return out;
}

double finite_or_inf(double value) {
  return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
}

}  // namespace

std::string algorithm_name(Algorithm algorithm) { return info(algorithm).name; }

Algorithm parse_algorithm(const std::string& name) {
  for (const AlgorithmInfo& entry : kAlgorithms) {
    if (name == entry.name) return entry.algorithm;
  }
  if (name == "erm-ridge") return Algorithm::erm_ridge;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all = [] {
    std::vector<Algorithm> out;
    for (const AlgorithmInfo& entry : kAlgorithms) out.push_back(entry.algorithm);
    return out;
  }();
  return all;
}

Regime algorithm_regime(Algorithm algorithm) { return info(algorithm).regime; }

bool is_budgeted(Algorithm algorithm) { return info(algorithm).budgeted; }

bool uses_step_size(Algorithm algorithm) {
  return algorithm != Algorithm::erm_ridge && algorithm != Algorithm::erm_lasso;
}

BudgetSplit split_budget(std::size_t k, std::optional<double> fraction) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (!fraction) return {k, 1};
  if (!(*fraction > 0.0 && *fraction < 1.0)) {
    throw std::invalid_argument("budget_split must lie in (0, 1)");
  }
  const double total = static_cast<double>(k + 1);
  auto point = static_cast<std::size_t>(std::llround(*fraction * total));
  point = std::clamp<std::size_t>(point, 1, k);
  return {point, k + 1 - point};
}

std::vector<double> dataset_moments(std::span<const Example> examples) {
  if (examples.empty()) throw std::invalid_argument("empty dataset");
  std::vector<double> moments(examples.front().x.size(), 0.0);
  for (const Example& ex : examples) {
    for (std::size_t i = 0; i < moments.size(); ++i) moments[i] += ex.x[i] * ex.x[i];
  }
  for (double& v : moments) v /= static_cast<double>(examples.size());
  return moments;
}

double relative_loss(std::span<const double> weights, std::span<const Example> test) {
  if (test.empty()) throw std::invalid_argument("empty test set");
  double model = 0.0;
  double zero = 0.0;
  for (const Example& ex : test) {
    model += squared_loss(dot(weights, ex.x), ex.y);
    zero += squared_loss(0.0, ex.y);
  }
  if (zero == 0.0) throw std::invalid_argument("zero-predictor loss undefined");
  return model / zero;
}

double theoretical_eta(Algorithm algorithm, std::size_t m, std::size_t dim,
                       const TrainParams& params, std::span<const double> moments) {
  const BudgetSplit split = split_budget(params.k, params.budget_split);
  const double B = params.bound;
  const double md = static_cast<double>(m);
  switch (algorithm) {
    case Algorithm::aerr:
      return aerr_eta(m, split.point_draws, dim, B);
    case Algorithm::ddaerr:
      return ridge_eta_known_moments(m, split.point_draws, norm(moments, NormKind::half));
    case Algorithm::aelr:
      return aelr_eta(m, split.point_draws, dim, B);
    case Algorithm::ddaelr:
      return lasso_eta_known_moments(md, split.point_draws, dim, B, norm(moments, NormKind::one))
          .eta;
    case Algorithm::two_phase_ddaerr:
    case Algorithm::two_phase_ddaelr: {
      // Phase-2 rate with the phase-1 statistics replaced by their
      // worst case; run_two_phase recomputes it from the real table.
      const std::size_t m1 = phase_one_size(m, params.m1_fraction);
      const double m2 = std::max(1.0, md - static_cast<double>(m1));
      if (algorithm == Algorithm::two_phase_ddaerr) {
        return ridge_eta_two_phase(m1, m2, split.point_draws, dim, params.delta,
                                   static_cast<double>(dim));
      }
      return lasso_eta_two_phase(m1, m2, split.point_draws, dim, params.delta,
                                 static_cast<double>(dim), B);
    }
    case Algorithm::ogd_full:
      // ||gradient||_2 <= 2B, so 2B / (G sqrt m) = 1 / sqrt m.
      return 1.0 / std::sqrt(md);
    case Algorithm::adagrad_ogd_full:
    case Algorithm::adagrad_aerr:
    case Algorithm::adagrad_ddaerr:
      return B;
    case Algorithm::adagrad_aelr:
    case Algorithm::adagrad_ddaelr:
      return 1.0;
    case Algorithm::eg_full: {
      const double G = 2.0 * B;
      const double eta = std::sqrt(std::log(2.0 * static_cast<double>(dim)) / (5.0 * md)) / G;
      return std::min(eta, 1.0 / (2.0 * G));
    }
    case Algorithm::erm_ridge:
    case Algorithm::erm_lasso:
      return 0.0;
  }
  throw std::logic_error("unreachable algorithm");
}

TrainOutcome train_model(Algorithm algorithm, std::span<const Example> train,
                         const TrainParams& params, std::uint64_t seed) {
  if (train.empty()) throw std::invalid_argument("empty dataset");
  const std::size_t dim = train.front().x.size();
  const std::size_t m = train.size();
  const BudgetSplit split = split_budget(params.k, params.budget_split);

  std::vector<double> moments;
  if (is_data_dependent(algorithm) && algorithm != Algorithm::two_phase_ddaerr &&
      algorithm != Algorithm::two_phase_ddaelr) {
    moments = params.known_moments.empty() ? dataset_moments(train) : params.known_moments;
    if (moments.size() != dim) throw std::invalid_argument("known moments dimension mismatch");
  }

  TrainOutcome out;
  const bool two_phase =
      algorithm == Algorithm::two_phase_ddaerr || algorithm == Algorithm::two_phase_ddaelr;
  if (two_phase) {
    TwoPhaseConfig config;
    config.m1 = phase_one_size(m, params.m1_fraction);
    config.m2 = m - std::min(m, config.m1);
    config.delta = params.delta;
    config.bound = params.bound;
    config.k = split.point_draws;
    config.inner_draws = split.inner_draws;
    config.regime = algorithm_regime(algorithm);
    config.phase1_mode = params.phase1_mode;
    config.epsilon_override = params.epsilon_override;
    config.eta = params.eta;
    config.phase1_eta = params.eta;
    config.p_mode = params.p_mode;
    config.q_floor = params.q_floor;
    TwoPhaseResult result = run_two_phase(train, config, seed);
    out.result = std::move(result.result);
    out.eta = result.diagnostics.eta;
    return out;
  }

  out.eta = uses_step_size(algorithm)
                ? params.eta.value_or(theoretical_eta(algorithm, m, dim, params, moments))
                : 0.0;

  SolverConfig solver;
  solver.bound = params.bound;
  solver.eta = out.eta;
  solver.k = split.point_draws;
  solver.inner_draws = split.inner_draws;
  switch (algorithm) {
    case Algorithm::aerr:
    case Algorithm::adagrad_aerr:
    case Algorithm::aelr:
    case Algorithm::adagrad_aelr:
      solver.q = aerr_q(dim);
      break;
    case Algorithm::ddaerr:
    case Algorithm::adagrad_ddaerr:
      solver.q = ridge_optimal_q(moments).with_floor(params.q_floor);
      solver.p_mode = params.p_mode;
      solver.moments = moments;
      solver.p_floor = params.q_floor;
      break;
    case Algorithm::ddaelr:
    case Algorithm::adagrad_ddaelr:
      solver.q = lasso_optimal_q(moments).with_floor(params.q_floor);
      solver.p_mode = params.p_mode;
      solver.moments = moments;
      solver.p_floor = params.q_floor;
      break;
    default:
      break;
  }

  switch (algorithm) {
    case Algorithm::aerr:
    case Algorithm::ddaerr:
      out.result = run_gaerr(train, solver, seed);
      break;
    case Algorithm::aelr:
    case Algorithm::ddaelr:
      out.result = run_gaelr(train, solver, seed);
      break;
    case Algorithm::ogd_full:
      out.result = online_ridge_full(train, params.bound, out.eta);
      break;
    case Algorithm::eg_full:
      out.result = online_lasso_full(train, params.bound, out.eta);
      break;
    case Algorithm::erm_ridge:
    case Algorithm::erm_lasso: {
      ErmOptions options;
      options.passes = params.erm_passes;
      out.result = offline_erm(train, params.bound, algorithm_regime(algorithm), options).result;
      break;
    }
    case Algorithm::adagrad_ogd_full:
    case Algorithm::adagrad_aerr:
    case Algorithm::adagrad_ddaerr:
    case Algorithm::adagrad_aelr:
    case Algorithm::adagrad_ddaelr: {
      AdagradConfig config;
      config.solver = solver;
      config.eta0 = out.eta;
      const AdagradBase base = algorithm == Algorithm::adagrad_ogd_full ? AdagradBase::online_full
                               : algorithm_regime(algorithm) == Regime::l2 ? AdagradBase::gaerr
                                                                           : AdagradBase::gaelr;
      out.result = adagrad_variant(base, train, config, seed);
      break;
    }
    default:
      throw std::logic_error("unhandled algorithm");
  }
  return out;
}

CrossValidation cross_validate(std::span<const Example> train, Algorithm algorithm,
                               const TrainParams& params, std::span<const double> eta_grid,
                               std::size_t folds, std::uint64_t seed) {
  if (eta_grid.empty()) throw std::invalid_argument("empty eta grid");
  if (folds < 2) throw std::invalid_argument("folds must be at least 2");
  if (train.size() < folds) throw std::invalid_argument("fewer examples than folds");

  const std::vector<std::size_t> order = shuffled_indices(train.size(), derive_seed(seed, "folds"));
  std::vector<std::vector<Example>> fit_sets(folds);
  std::vector<std::vector<Example>> held_out(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t begin = f * train.size() / folds;
    const std::size_t end = (f + 1) * train.size() / folds;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      (pos >= begin && pos < end ? held_out[f] : fit_sets[f]).push_back(train[order[pos]]);
    }
  }

  CrossValidation cv;
  cv.mean_loss.assign(eta_grid.size(), std::numeric_limits<double>::infinity());
  double best = std::numeric_limits<double>::infinity();
  bool have_best = false;
  for (std::size_t g = 0; g < eta_grid.size(); ++g) {
    TrainParams trial = params;
    trial.eta = eta_grid[g];
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      const bool all_zero = std::all_of(held_out[f].begin(), held_out[f].end(),
                                        [](const Example& ex) { return ex.y == 0.0; });
      if (all_zero) continue;
      const TrainOutcome outcome = train_model(algorithm, fit_sets[f], trial, derive_seed(seed, f));
      total += finite_or_inf(relative_loss(outcome.result.predictor.weights, held_out[f]));
      ++used;
    }
    if (used == 0) throw std::invalid_argument("every validation fold has all-zero targets");
    const double mean = finite_or_inf(total / static_cast<double>(used));
    cv.mean_loss[g] = mean;
    if (!have_best || mean < best || (mean == best && eta_grid[g] < cv.best_eta)) {
      best = mean;
      cv.best_eta = eta_grid[g];
      have_best = true;
    }
  }
  return cv;
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& task) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            task(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t workers) {
  if (config.algorithms.empty()) throw std::invalid_argument("no algorithms configured");
  if (config.prefixes.empty()) throw std::invalid_argument("no prefixes configured");
  if (config.repeats == 0) throw std::invalid_argument("repeats must be at least 1");
  if (config.eta_mode == EtaMode::cross_validation && config.eta_grid.empty()) {
    throw std::invalid_argument("eta_grid is required for cross-validation");
  }
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie in (0, 1)");
  }

  const Regime regime = algorithm_regime(config.algorithms.front());
  for (Algorithm a : config.algorithms) {
    if (algorithm_regime(a) != regime) {
      throw std::invalid_argument("algorithms mix ridge and lasso regimes");
    }
  }

  // Dataset and held-out split.
  Dataset full;
  std::optional<double> derived_bound;
  if (config.data_csv) {
    full = load_csv(*config.data_csv, config.csv_header, config.label_column);
    if (config.positive_class) {
      full = binarize_labels(full, *config.positive_class, config.keep_labels);
    }
  } else {
    if (config.regime != regime) {
      throw std::invalid_argument("synthetic regime does not match the algorithms");
    }
    SyntheticData data =
        generate_synthetic(config.dim, config.alpha, regime, config.m_total, config.data_seed);
    full = std::move(data.dataset);
    double max_target = 0.0;
    for (const Example& ex : full.examples) max_target = std::max(max_target, std::abs(ex.y));
    derived_bound = std::max(predictor_norm(data.target_weights, regime), max_target);
  }

  const std::vector<std::size_t> order = shuffled_indices(full.size(), derive_seed(config.seed, "split"));
  const auto test_count = static_cast<std::size_t>(
      std::llround(config.test_fraction * static_cast<double>(full.size())));
  if (test_count == 0 || test_count >= full.size()) {
    throw std::invalid_argument("dataset too small for the requested test split");
  }
  Dataset train_raw{full.dim, full.regime, gather(full.examples, std::span(order).subspan(test_count))};
  Dataset test_raw{full.dim, full.regime, gather(full.examples, std::span(order).first(test_count))};

  ExperimentResult result;
  const Normalizer normalizer = Normalizer::fit(train_raw, regime);
  Dataset train;
  Dataset test;
  if (config.data_csv && !inside_unit_ball(full, regime)) {
    train = normalizer.apply(train_raw).dataset;
    NormalizeResult normalized_test = normalizer.apply(test_raw);
    test = std::move(normalized_test.dataset);
    result.test_rescaled = normalized_test.rescaled;
  } else {
    train = std::move(train_raw);
    test = std::move(test_raw);
    train.regime = regime;
    test.regime = regime;
  }

  if (config.bound) {
    result.bound = *config.bound;
  } else if (derived_bound) {
    result.bound = *derived_bound;
  } else {
    throw std::invalid_argument("bound is required for CSV datasets");
  }
  validate_dataset(train, result.bound);
  result.dim = train.dim;
  result.train_size = train.size();
  result.test_size = test.size();
  result.train_moments = dataset_moments(train.examples);

  for (std::size_t prefix : config.prefixes) {
    if (prefix == 0 || prefix > train.size()) {
      throw std::invalid_argument("prefix " + std::to_string(prefix) +
                                  " exceeds the training split (" +
                                  std::to_string(train.size()) + " examples)");
    }
  }

  TrainParams base;
  base.bound = result.bound;
  base.k = config.k;
  base.budget_split = config.budget_split;
  base.delta = config.delta;
  base.m1_fraction = config.m1_fraction;
  base.epsilon_override = config.epsilon_override;
  base.phase1_mode = PhaseOneMode::warm_start;
  base.p_mode = config.p_mode;
  base.q_floor = config.q_floor;
  base.erm_passes = config.erm_passes;
  base.known_moments = result.train_moments;

  const std::size_t n_alg = config.algorithms.size();
  const std::size_t n_pre = config.prefixes.size();

  // Step-size selection per (algorithm, prefix).
  const std::vector<std::size_t> cv_order =
      shuffled_indices(train.size(), derive_seed(config.seed, "cv-order"));
  const std::vector<Example> cv_pool = gather(train.examples, cv_order);
  std::vector<double> etas(n_alg * n_pre, 0.0);
  parallel_for(n_alg * n_pre, workers, [&](std::size_t task) {
    const std::size_t a = task / n_pre;
    const std::size_t p = task % n_pre;
    const Algorithm algorithm = config.algorithms[a];
    const std::size_t m = config.prefixes[p];
    if (!uses_step_size(algorithm)) return;
    if (config.eta_mode == EtaMode::theory) {
      etas[task] = theoretical_eta(algorithm, m, train.dim, base, result.train_moments);
      return;
    }
    const std::span<const Example> pool(cv_pool.data(), m);
    etas[task] = cross_validate(pool, algorithm, base, config.eta_grid, config.folds,
                                derive_seed(config.seed, 1000 + a, p))
                     .best_eta;
  });
  for (std::size_t a = 0; a < n_alg; ++a) {
    for (std::size_t p = 0; p < n_pre; ++p) {
      result.etas[{config.algorithms[a], config.prefixes[p]}] = etas[a * n_pre + p];
    }
  }

  // Repeated runs on shuffled prefixes; every algorithm sees the same order
  // within a repeat.
  std::vector<std::vector<std::size_t>> repeat_orders(config.repeats);
  for (std::size_t r = 0; r < config.repeats; ++r) {
    repeat_orders[r] = shuffled_indices(train.size(), derive_seed(config.seed, 2000, r));
  }
  result.records.resize(n_alg * n_pre * config.repeats);
  parallel_for(result.records.size(), workers, [&](std::size_t task) {
    const std::size_t a = task / (n_pre * config.repeats);
    const std::size_t p = (task / config.repeats) % n_pre;
    const std::size_t r = task % config.repeats;
    const Algorithm algorithm = config.algorithms[a];
    const std::size_t m = config.prefixes[p];
    const std::vector<Example> prefix =
        gather(train.examples, std::span(repeat_orders[r]).first(m));
    TrainParams params = base;
    if (uses_step_size(algorithm)) params.eta = etas[a * n_pre + p];
    const std::uint64_t seed = derive_seed(config.seed, 3000 + a, p, r);
    const TrainOutcome outcome = train_model(algorithm, prefix, params, seed);
    RunRecord& record = result.records[task];
    record.algorithm = algorithm;
    record.seed = seed;
    record.repeat = r;
    record.m = m;
    record.attributes_observed = outcome.result.attributes_consumed;
    record.eta = outcome.eta;
    record.test_relative_loss = relative_loss(outcome.result.predictor.weights, test.examples);
  });

  for (std::size_t a = 0; a < n_alg; ++a) {
    LearningCurve curve;
    curve.algorithm = config.algorithms[a];
    for (std::size_t p = 0; p < n_pre; ++p) {
      const auto first = result.records.begin() +
                         static_cast<std::ptrdiff_t>((a * n_pre + p) * config.repeats);
      const auto last = first + static_cast<std::ptrdiff_t>(config.repeats);
      CurvePoint point;
      point.m = config.prefixes[p];
      double mean = 0.0;
      double budget = 0.0;
      for (auto it = first; it != last; ++it) {
        mean += it->test_relative_loss;
        budget += static_cast<double>(it->attributes_observed);
      }
      const double n = static_cast<double>(config.repeats);
      mean /= n;
      double sq = 0.0;
      for (auto it = first; it != last; ++it) {
        sq += (it->test_relative_loss - mean) * (it->test_relative_loss - mean);
      }
      point.mean = mean;
      point.attributes_observed = budget / n;
      point.stddev = config.repeats > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
      curve.points.push_back(point);
    }
    std::stable_sort(curve.points.begin(), curve.points.end(),
                     [](const CurvePoint& x, const CurvePoint& y) {
                       return x.attributes_observed < y.attributes_observed;
                     });
    result.curves.push_back(std::move(curve));
  }
  return result;
}

}  // namespace budgetreg
