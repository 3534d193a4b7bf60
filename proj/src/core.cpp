#include "budgetreg/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace budgetreg {

std::string to_string(Regime regime) {
  return regime == Regime::l2 ? "l2" : "linf";
}

Regime parse_regime(const std::string& text) {
  if (text == "l2" || text == "L2" || text == "ridge") return Regime::l2;
  if (text == "linf" || text == "Linf" || text == "lasso") return Regime::linf;
  throw std::invalid_argument("unknown regime '" + text + "' (expected l2 or linf)");
}

double Predictor::predict(std::span<const double> x) const {
  return dot(weights, x);
}

double norm(std::span<const double> v, NormKind kind) {
  if (v.empty()) throw std::invalid_argument("zero dimension");
  switch (kind) {
    case NormKind::half: {
      double root_sum = 0.0;
      for (double value : v) root_sum += std::sqrt(std::abs(value));
      return root_sum * root_sum;
    }
    case NormKind::one: {
      double sum = 0.0;
      for (double value : v) sum += std::abs(value);
      return sum;
    }
    case NormKind::two: {
      double sum = 0.0;
      for (double value : v) sum += value * value;
      return std::sqrt(sum);
    }
    case NormKind::inf: {
      double best = 0.0;
      for (double value : v) best = std::max(best, std::abs(value));
      return best;
    }
  }
  throw std::logic_error("unreachable norm kind");
}

double clip(double x, double c) { return std::max(std::min(x, c), -c); }

std::vector<double> project_l2_ball(std::span<const double> v, double bound) {
  std::vector<double> out(v.begin(), v.end());
  project_l2_ball_inplace(out, bound);
  return out;
}

void project_l2_ball_inplace(std::vector<double>& v, double bound) {
  double sq = 0.0;
  for (double value : v) sq += value * value;
  const double length = std::sqrt(sq);
  if (length <= bound) return;
  const double scale = bound / length;
  for (double& value : v) value *= scale;
}

std::vector<double> project_l1_ball(std::span<const double> v, double bound) {
  std::vector<double> out(v.begin(), v.end());
  if (bound <= 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  double l1 = 0.0;
  for (double value : v) l1 += std::abs(value);
  if (l1 <= bound) return out;

  std::vector<double> magnitudes(v.size());
  std::transform(v.begin(), v.end(), magnitudes.begin(),
                 [](double value) { return std::abs(value); });
  std::sort(magnitudes.begin(), magnitudes.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t j = 0; j < magnitudes.size(); ++j) {
    cumulative += magnitudes[j];
    const double candidate = (cumulative - bound) / static_cast<double>(j + 1);
    if (magnitudes[j] > candidate) threshold = candidate;
  }
  for (double& value : out) {
    const double shrunk = std::max(std::abs(value) - threshold, 0.0);
    value = std::copysign(shrunk, value);
  }
  return out;
}

double squared_loss(double prediction, double y) {
  const double diff = prediction - y;
  return 0.5 * diff * diff;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double predictor_norm(std::span<const double> w, Regime regime) {
  return norm(w, regime == Regime::l2 ? NormKind::two : NormKind::one);
}

void validate_dataset(const Dataset& dataset, std::optional<double> target_bound) {
  if (dataset.dim == 0) throw std::invalid_argument("zero dimension");
  for (std::size_t t = 0; t < dataset.examples.size(); ++t) {
    const Example& ex = dataset.examples[t];
    const std::string where = "example " + std::to_string(t + 1);
    if (ex.x.size() != dataset.dim) {
      throw std::invalid_argument(where + ": expected " + std::to_string(dataset.dim) +
                                  " attributes, got " + std::to_string(ex.x.size()));
    }
    for (double value : ex.x) {
      if (!std::isfinite(value)) throw std::invalid_argument(where + ": non-finite attribute");
    }
    if (!std::isfinite(ex.y)) throw std::invalid_argument(where + ": non-finite target");
    if (dataset.regime) {
      const NormKind kind = *dataset.regime == Regime::l2 ? NormKind::two : NormKind::inf;
      if (norm(ex.x, kind) > 1.0 + kBallTolerance) {
        throw std::invalid_argument(where + ": outside the " + to_string(*dataset.regime) +
                                    " unit ball");
      }
    }
    if (target_bound && std::abs(ex.y) > *target_bound + kBallTolerance) {
      throw std::invalid_argument(where + ": |y| exceeds the target bound");
    }
  }
}

}  // namespace budgetreg
