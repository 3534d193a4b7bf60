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

/// Exponentiated-gradient state. The iterate is
/// w = (z+ - z-) B / (||z+||_1 + ||z-||_1), so ||w||_1 <= B always.
struct EGState {
  std::vector<double> z_plus;
  std::vector<double> z_minus;
  std::vector<double> sum_w;
  std::size_t steps = 0;
  std::size_t attributes_consumed = 0;
  std::size_t attributes_read = 0;
};

/// z+ and z- rescaled by a common factor once any entry passes this value.
inline constexpr double kEgRenormalizeThreshold = 1e100;

EGState make_eg_state(std::size_t dim);

/// EG state whose iterate equals w (requires ||w||_1 <= B). Used to warm
/// start from an earlier solution.
EGState eg_state_from_weights(std::span<const double> w, double bound);

std::vector<double> eg_weights(const EGState& state, double bound);

/// Divides z+ and z- by their largest entry once it exceeds
/// kEgRenormalizeThreshold. The iterate is unchanged.
void renormalize_eg(EGState& state);

/// Multiplicative update with g~ clipped at 1/eta on its sparse support.
/// Does not touch sum_w or counters.
void apply_eg_update(EGState& state, const GradientEstimate& g, double eta);

/// One step: records w_t into sum_w, samples g~, then updates z.
void gaelr_step(EGState& state, const Example& example, const SolverConfig& config, Rng& rng,
                const PointDrawObserver& observer = {});

SolverResult finish_eg(const EGState& state, double bound);

SolverResult run_gaelr(std::span<const Example> examples, const SolverConfig& config,
                       std::uint64_t seed);
SolverResult run_gaelr(std::span<const Example> examples, const SolverConfig& config, Rng& rng,
                       EGState& state, const PointDrawObserver& observer = {});

/// AERR-style 2B / (G sqrt m) with G = B sqrt(8d/k), capped at 1 / (2G).
double aelr_eta(std::size_t m, std::size_t k, std::size_t dim, double bound);

struct LassoStepSize {
  double eta = 0.0;
  /// m < ln(2d): the risk bound is not guaranteed for this step size.
  bool below_min_examples = false;
};

/// (1 / 2B) sqrt(ln(2d) / (5 m (l1_moment / k + 1))).
LassoStepSize lasso_eta_known_moments(double m, std::size_t k, std::size_t dim, double bound,
                                      double l1_moment);

/// sqrt(k ln(2d) / (20 B^2 m2 (8 ||A||_1 + 20 d eps + k))) with eps capped at 1.
double lasso_eta_two_phase(std::size_t m1, double m2, std::size_t k, std::size_t dim,
                           double delta, double a_l1, double bound);

}  // namespace budgetreg
