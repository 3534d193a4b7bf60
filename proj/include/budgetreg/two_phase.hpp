#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "budgetreg/core.hpp"
#include "budgetreg/rng.hpp"
#include "budgetreg/sampling.hpp"
#include "budgetreg/solver.hpp"

namespace budgetreg {

/// Phase-1 per-attribute statistics gathered from uniformly sampled reads.
struct MomentTable {
  std::vector<std::size_t> counts;
  std::vector<double> square_sums;
  /// Empirical second moments: square_sums / counts, 0 where unobserved.
  std::vector<double> A;
  std::size_t m1 = 0;
  std::size_t draws = 0;

  explicit MomentTable(std::size_t dim = 0);
  void record(std::size_t index, double value);
};

/// k + 1 uniform reads per example (k = budget minus one).
MomentTable estimate_moments(std::span<const Example> examples, std::size_t k, Rng& rng);
MomentTable estimate_moments(std::span<const Example> examples, std::size_t k,
                             std::uint64_t seed);

struct SmoothingParams {
  double epsilon = 0.0;
  double delta = 0.1;
  bool capped = false;
};

/// eps = d ln(2d/delta) / ((k+1) m1); the lasso variant caps it at 1.
/// m1 = 0 is an error for ridge and gives eps = 1 for lasso.
SmoothingParams smoothing_epsilon(std::size_t dim, double delta, std::size_t k, std::size_t m1,
                                  Regime regime);

/// Ridge: q ~ sqrt(A + 13 eps / 6). Lasso: q ~ A + 13 eps / 6.
/// A nonzero floor is mixed in afterwards.
AttributeDistribution smoothed_q(std::span<const double> A, double epsilon, Regime regime,
                                 double floor = 0.0);

/// H = || 2A + 10 eps / 3 ||_{1/2}.
double estimate_half_norm(std::span<const double> A, double epsilon);

/// max( sqrt(k / (6 d m2)),
///      sqrt(k / (m2 (2H + 2 sqrt(5/3) d sqrt(H) sqrt(eps) + k))) ).
double ridge_eta_two_phase(double m2, std::size_t k, std::size_t dim, double half_norm,
                           double epsilon);
/// Same with eps computed from (m1, delta); m1 = 0 leaves only the first branch.
double ridge_eta_two_phase(std::size_t m1, double m2, std::size_t k, std::size_t dim,
                           double delta, double half_norm);

/// Lasso phase-2 rate with an explicit (already capped) eps.
double lasso_eta_two_phase_eps(double m2, std::size_t k, std::size_t dim, double a_l1,
                               double bound, double epsilon);

enum class PhaseOneMode {
  pure_estimation,  ///< moments only; phase 2 starts from the default iterate
  warm_start,       ///< also run the uniform-q solver and continue from its output
};

struct TwoPhaseConfig {
  std::size_t m1 = 0;
  std::size_t m2 = 0;
  double delta = 0.1;
  double bound = 1.0;
  std::size_t k = 1;  ///< point draws per example
  std::size_t inner_draws = 1;
  Regime regime = Regime::l2;
  PhaseOneMode phase1_mode = PhaseOneMode::pure_estimation;
  /// Replaces eps in smoothed_q only; step sizes keep the computed eps.
  std::optional<double> epsilon_override;
  /// Phase-2 step size; unset selects the theoretical rate.
  std::optional<double> eta;
  /// Step size of the warm-start solver; unset selects the AERR/AELR rate.
  std::optional<double> phase1_eta;
  /// Known ||E[x^2]||_{1/2} for the ridge step size; unset uses H.
  std::optional<double> known_half_norm;
  InnerProductMode p_mode = InnerProductMode::standard;
  double q_floor = 0.0;
};

struct TwoPhaseDiagnostics {
  MomentTable moments;
  SmoothingParams smoothing;
  double epsilon_for_q = 0.0;
  double half_norm_estimate = 0.0;
  double eta = 0.0;
  std::size_t phase1_budget = 0;
  std::size_t phase2_budget = 0;
  AttributeDistribution q;
};

struct TwoPhaseResult {
  SolverResult result;
  TwoPhaseDiagnostics diagnostics;
};

/// Phase 1 on examples[0, m1), phase 2 on examples[m1, m1 + m2).
TwoPhaseResult run_two_phase(std::span<const Example> examples, const TwoPhaseConfig& config,
                             std::uint64_t seed);

}  // namespace budgetreg
