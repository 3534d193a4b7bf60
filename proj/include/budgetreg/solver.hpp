#pragma once

#include <cstddef>
#include <vector>

#include "budgetreg/core.hpp"
#include "budgetreg/sampling.hpp"

namespace budgetreg {

/// Parameters shared by the budgeted ridge (projected OGD) and lasso (EG)
/// skeletons. Each example costs k + inner_draws attribute observations.
struct SolverConfig {
  double bound = 1.0;  ///< B
  double eta = 0.1;
  std::size_t k = 1;  ///< point-estimation draws per example
  std::size_t inner_draws = 1;
  AttributeDistribution q;
  InnerProductMode p_mode = InnerProductMode::standard;
  /// Second-moment vector used by the improved inner-product probabilities.
  std::vector<double> moments;
  /// Floor mixed into the inner-product distribution (0 disables).
  double p_floor = 0.0;
  /// Starting iterate; empty selects the solver default.
  std::vector<double> initial_w;
};

struct SolverResult {
  /// Average of the iterates visited before each update.
  Predictor predictor;
  std::vector<double> last_iterate;
  /// Budget charged: (k + inner_draws) per example for budgeted solvers,
  /// d per example for full-information ones.
  std::size_t attributes_consumed = 0;
  /// Attribute values actually read. Differs from attributes_consumed only
  /// on steps where w = 0 and the inner-product draw is skipped.
  std::size_t attributes_read = 0;
  std::size_t steps = 0;
};

}  // namespace budgetreg
