#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "budgetreg/core.hpp"
#include "budgetreg/sampling.hpp"
#include "budgetreg/solver.hpp"
#include "budgetreg/two_phase.hpp"

namespace budgetreg {

enum class Algorithm {
  aerr,
  ddaerr,
  two_phase_ddaerr,
  aelr,
  ddaelr,
  two_phase_ddaelr,
  ogd_full,
  eg_full,
  erm_ridge,
  erm_lasso,
  adagrad_ogd_full,
  adagrad_aerr,
  adagrad_ddaerr,
  adagrad_aelr,
  adagrad_ddaelr,
};

/// CLI names: aerr, ddaerr, 2p-ddaerr, aelr, ddaelr, 2p-ddaelr, ogd-full,
/// eg-full, erm (ridge), erm-lasso, adagrad-ogd-full, adagrad-aerr, ...
std::string algorithm_name(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);
const std::vector<Algorithm>& all_algorithms();

Regime algorithm_regime(Algorithm algorithm);
/// Attribute-efficient (k + 1 reads per example) as opposed to full information.
bool is_budgeted(Algorithm algorithm);
bool uses_step_size(Algorithm algorithm);

struct BudgetSplit {
  std::size_t point_draws = 1;
  std::size_t inner_draws = 1;
};

/// k is the per-example budget minus one. Without a split fraction the
/// budget is k point draws plus one inner-product draw. With a fraction,
/// point draws = round(fraction * (k + 1)) clamped to [1, k] and the rest
/// go to the inner product.
BudgetSplit split_budget(std::size_t k, std::optional<double> fraction);

struct TrainParams {
  double bound = 1.0;
  std::size_t k = 4;
  std::optional<double> budget_split;
  /// Unset selects the theoretical rate of the algorithm.
  std::optional<double> eta;
  double delta = 0.1;
  double m1_fraction = 0.1;
  std::optional<double> epsilon_override;
  PhaseOneMode phase1_mode = PhaseOneMode::warm_start;
  /// Inner-product mode of the data-dependent algorithms; uniform ones
  /// always use the standard probabilities.
  InnerProductMode p_mode = InnerProductMode::improved;
  double q_floor = 0.0;
  std::size_t erm_passes = 2000;
  /// E[x^2] handed to the known-moment algorithms; empty means "compute
  /// from the training examples".
  std::vector<double> known_moments;
};

struct TrainOutcome {
  SolverResult result;
  double eta = 0.0;
};

/// Theoretical step size for an algorithm trained on m examples.
double theoretical_eta(Algorithm algorithm, std::size_t m, std::size_t dim,
                       const TrainParams& params, std::span<const double> moments);

TrainOutcome train_model(Algorithm algorithm, std::span<const Example> train,
                         const TrainParams& params, std::uint64_t seed);

/// Exact empirical second moments (1/m) sum_t x_t^2.
std::vector<double> dataset_moments(std::span<const Example> examples);

/// sum l(<w,x>, y) / sum l(0, y). Throws when every target is zero.
double relative_loss(std::span<const double> weights, std::span<const Example> test);

struct CrossValidation {
  double best_eta = 0.0;
  /// Mean validation relative loss per grid entry (+inf for diverged runs).
  std::vector<double> mean_loss;
};

/// Picks the grid value with the smallest mean validation loss; ties go to
/// the smaller eta, then to the earlier grid entry.
CrossValidation cross_validate(std::span<const Example> train, Algorithm algorithm,
                               const TrainParams& params, std::span<const double> eta_grid,
                               std::size_t folds, std::uint64_t seed);

enum class EtaMode { cross_validation, theory };

struct ExperimentConfig {
  std::vector<Algorithm> algorithms;

  // Data: a CSV file, or synthetic power-law data when data_csv is unset.
  std::optional<std::string> data_csv;
  bool csv_header = false;
  std::optional<std::size_t> label_column;
  std::optional<double> positive_class;
  std::optional<std::vector<double>> keep_labels;
  std::size_t dim = 50;
  double alpha = -2.0;
  Regime regime = Regime::l2;
  std::size_t m_total = 2500;
  std::uint64_t data_seed = 1;

  std::optional<double> bound;
  std::size_t k = 4;
  double budget_split = 0.5;
  std::size_t repeats = 100;
  std::vector<std::size_t> prefixes;
  std::size_t folds = 10;
  std::vector<double> eta_grid;
  EtaMode eta_mode = EtaMode::cross_validation;
  double m1_fraction = 0.1;
  double test_fraction = 0.2;
  double delta = 0.1;
  std::optional<double> epsilon_override = 0.0;
  double q_floor = 0.0;
  InnerProductMode p_mode = InnerProductMode::improved;
  std::size_t erm_passes = 2000;
  std::uint64_t seed = 0;
};

struct RunRecord {
  Algorithm algorithm = Algorithm::aerr;
  std::uint64_t seed = 0;
  std::size_t repeat = 0;
  std::size_t m = 0;
  std::size_t attributes_observed = 0;
  double eta = 0.0;
  double test_relative_loss = 0.0;
};

struct CurvePoint {
  std::size_t m = 0;
  double attributes_observed = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct LearningCurve {
  Algorithm algorithm = Algorithm::aerr;
  std::vector<CurvePoint> points;
};

struct ExperimentResult {
  double bound = 0.0;
  std::size_t dim = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t test_rescaled = 0;
  std::vector<double> train_moments;
  /// Selected step size per (algorithm, prefix).
  std::map<std::pair<Algorithm, std::size_t>, double> etas;
  std::vector<RunRecord> records;
  std::vector<LearningCurve> curves;
};

/// Runs every (algorithm, prefix, repeat) task, optionally on a worker pool
/// (workers = 0 uses the hardware concurrency). Output depends only on the
/// config.
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t workers = 1);

/// Calls task(i) for i in [0, n) on up to `workers` threads. The first
/// exception (by index) is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& task);

}  // namespace budgetreg
