#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "budgetreg/core.hpp"
#include "budgetreg/solver.hpp"

namespace budgetreg {

/// Projected OGD on exact gradients (<w,x> - y) x. Empty initial_w selects
/// the ridge default start.
SolverResult online_ridge_full(std::span<const Example> examples, double bound, double eta,
                               std::span<const double> initial_w = {});

/// EG with z+/z- updates on exact, clipped gradients.
SolverResult online_lasso_full(std::span<const Example> examples, double bound, double eta);

double empirical_risk(std::span<const Example> examples, std::span<const double> w);

struct ErmOptions {
  std::size_t passes = 2000;
  double tolerance = 1e-8;
};

struct ErmResult {
  SolverResult result;
  /// Empirical risk after every accepted step, starting from w = 0.
  std::vector<double> risk_history;
  std::size_t passes_used = 0;
};

/// Multi-pass projected gradient descent with backtracking on the empirical
/// squared loss, over the L2 ball (l2) or the L1 ball (linf).
ErmResult offline_erm(std::span<const Example> examples, double bound, Regime regime,
                      const ErmOptions& options = {});

enum class AdagradBase { online_full, gaerr, gaelr };

struct AdagradConfig {
  /// bound, k, inner_draws, q, p_mode, moments and initial_w are used; eta
  /// is ignored in favour of eta0.
  SolverConfig solver;
  double eta0 = 1.0;
  double stabilizer = 1e-8;
};

/// Receives the per-coordinate accumulators after every step.
using AccumulatorObserver = std::function<void(const std::vector<double>&)>;

/// Per-coordinate steps eta0 / sqrt(stabilizer + sum_s g_{s,i}^2), with the
/// sum including the current gradient. Accumulators change only on the
/// support of the gradient estimate. The ridge bases keep the plain L2
/// projection.
SolverResult adagrad_variant(AdagradBase base, std::span<const Example> examples,
                             const AdagradConfig& config, std::uint64_t seed,
                             const AccumulatorObserver& observer = {});

}  // namespace budgetreg
