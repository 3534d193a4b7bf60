#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "budgetreg/core.hpp"
#include "budgetreg/estimator.hpp"
#include "budgetreg/rng.hpp"
#include "budgetreg/sampling.hpp"
#include "budgetreg/solver.hpp"

namespace budgetreg {

struct RidgeState {
  std::vector<double> w;
  std::vector<double> sum_w;
  std::size_t steps = 0;
  std::size_t attributes_consumed = 0;
  std::size_t attributes_read = 0;
};

/// (B / (2 sqrt d)) * (1, ..., 1): nonzero and strictly inside the ball.
std::vector<double> default_ridge_start(std::size_t dim, double bound);

RidgeState make_ridge_state(std::size_t dim, const SolverConfig& config);

/// One projected OGD step on a budgeted gradient estimate. The current
/// iterate is added to sum_w before it is updated.
void gaerr_step(RidgeState& state, const Example& example, const SolverConfig& config,
                Rng& rng, const PointDrawObserver& observer = {});

/// Same step with an explicit gradient estimate (no sampling).
void apply_ridge_update(RidgeState& state, const GradientEstimate& g, const SolverConfig& config);

SolverResult finish_ridge(const RidgeState& state, const SolverConfig& config);

/// Single ordered pass; deterministic given the seed. Throws on empty input.
SolverResult run_gaerr(std::span<const Example> examples, const SolverConfig& config,
                       std::uint64_t seed);
SolverResult run_gaerr(std::span<const Example> examples, const SolverConfig& config,
                       Rng& rng, RidgeState& state, const PointDrawObserver& observer = {});

/// Uniform q used by AERR.
AttributeDistribution aerr_q(std::size_t dim);

/// 2B / (G sqrt m) with G = B sqrt(8d/k), i.e. sqrt(k / (2 d m)).
double aerr_eta(std::size_t m, std::size_t k, std::size_t dim, double bound);

/// 1 / sqrt(m (half_norm / k + 1)).
double ridge_eta_known_moments(std::size_t m, std::size_t k, double half_norm);

}  // namespace budgetreg
