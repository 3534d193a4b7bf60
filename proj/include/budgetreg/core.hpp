#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace budgetreg {

/// Slack allowed on every ball constraint (data, predictors, distributions).
inline constexpr double kBallTolerance = 1e-9;

/// Norm geometry of a problem. Ridge problems live in the L2 regime
/// (||x||_2 <= 1, ||w||_2 <= B); lasso problems in the Linf regime
/// (||x||_inf <= 1, ||w||_1 <= B).
enum class Regime { l2, linf };

std::string to_string(Regime regime);
Regime parse_regime(const std::string& text);

enum class NormKind { half, one, two, inf };

struct Example {
  std::vector<double> x;
  double y = 0.0;
};

struct Dataset {
  std::size_t dim = 0;
  /// Unset for raw (not yet normalized) data.
  std::optional<Regime> regime;
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
};

struct Predictor {
  std::vector<double> weights;
  double norm_bound = 0.0;
  Regime regime = Regime::l2;

  double predict(std::span<const double> x) const;
};

/// p = half returns (sum_i sqrt|v_i|)^2, which is not a norm but governs the
/// ridge sampling cost. Throws std::invalid_argument on an empty vector.
double norm(std::span<const double> v, NormKind kind);

/// Clamp x into [-c, c].
double clip(double x, double c);

/// v * B / max(||v||_2, B).
std::vector<double> project_l2_ball(std::span<const double> v, double bound);
void project_l2_ball_inplace(std::vector<double>& v, double bound);

/// Euclidean projection onto {w : ||w||_1 <= bound} (sort-based).
std::vector<double> project_l1_ball(std::span<const double> v, double bound);

double squared_loss(double prediction, double y);

double dot(std::span<const double> a, std::span<const double> b);

/// Checks finiteness, shared dimension, the regime ball on every example and
/// |y| <= target_bound (when given). Throws std::invalid_argument naming the
/// first offending example.
void validate_dataset(const Dataset& dataset,
                      std::optional<double> target_bound = std::nullopt);

/// Norm matching the predictor constraint of a regime (L2 for ridge, L1 for
/// lasso).
double predictor_norm(std::span<const double> w, Regime regime);

}  // namespace budgetreg
