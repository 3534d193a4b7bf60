#pragma once

// Independent reference computations for the tests. Nothing here calls the
// code under test except where a test enumerates its outputs.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "budgetreg/estimator.hpp"
#include "budgetreg/sampling.hpp"

namespace oracle {

/// A uniform draw in the middle of each index's inverse-CDF bin.
inline std::vector<double> bin_midpoints(const std::vector<double>& probs) {
  std::vector<double> mid(probs.size());
  double left = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    mid[i] = left + probs[i] / 2.0;
    left += probs[i];
  }
  return mid;
}

/// Calls f(tuple, probability) for every n-tuple of indices with positive mass.
inline void enumerate_tuples(const std::vector<double>& probs, std::size_t n,
                             const std::function<void(const std::vector<std::size_t>&, double)>& f) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) support.push_back(i);
  }
  std::vector<std::size_t> pos(n, 0);
  std::vector<std::size_t> tuple(n);
  while (true) {
    double weight = 1.0;
    for (std::size_t r = 0; r < n; ++r) {
      tuple[r] = support[pos[r]];
      weight *= probs[tuple[r]];
    }
    f(tuple, weight);
    std::size_t r = 0;
    while (r < n && ++pos[r] == support.size()) pos[r++] = 0;
    if (r == n) break;
  }
}

struct Enumeration {
  std::vector<double> mean_gradient;
  double mean_point_sq = 0.0;  ///< E ||x~||^2 over k draws
  double mean_single_sq = 0.0;  ///< E ||x~_r||^2 for one draw
  double mean_phi = 0.0;
  double mean_phi_sq = 0.0;
  double total_probability = 0.0;
};

/// Exhaustive expectation of the library estimators over the joint draw space
/// (k point draws from q, one inner-product draw from p, or none when p is unset).
inline Enumeration enumerate_gradient(const budgetreg::Example& ex, const std::vector<double>& w,
                                      const std::vector<double>& q,
                                      const std::optional<std::vector<double>>& p, std::size_t k) {
  const budgetreg::AttributeDistribution qd = budgetreg::AttributeDistribution::from_weights(q);
  std::optional<budgetreg::AttributeDistribution> pd;
  if (p) pd = budgetreg::AttributeDistribution::from_weights(*p);
  const std::vector<double> q_mid = bin_midpoints(q);
  const std::vector<double> p_mid = p ? bin_midpoints(*p) : std::vector<double>{};
  const std::size_t d = ex.x.size();

  Enumeration out;
  out.mean_gradient.assign(d, 0.0);
  enumerate_tuples(q, k, [&](const std::vector<std::size_t>& tuple, double weight) {
    std::vector<double> draws(k);
    for (std::size_t r = 0; r < k; ++r) draws[r] = q_mid[tuple[r]];
    auto inner = [&](const std::vector<double>& inner_draws, double inner_weight) {
      const budgetreg::GradientEstimate g =
          budgetreg::gradient_estimate(ex, w, qd, pd, draws, inner_draws);
      const double mass = weight * inner_weight;
      const std::vector<double> dense = g.dense();
      for (std::size_t i = 0; i < d; ++i) out.mean_gradient[i] += mass * dense[i];
      out.mean_point_sq += mass * g.point.squared_norm();
      out.mean_phi += mass * g.phi;
      out.mean_phi_sq += mass * g.phi * g.phi;
      out.total_probability += mass;
    };
    if (p) {
      for (std::size_t j = 0; j < p->size(); ++j) {
        if ((*p)[j] > 0.0) inner({p_mid[j]}, (*p)[j]);
      }
    } else {
      inner({}, 1.0);
    }
  });
  for (std::size_t i = 0; i < d; ++i) {
    if (q[i] <= 0.0) continue;
    const std::vector<double> one{q_mid[i]};
    out.mean_single_sq += q[i] * budgetreg::estimate_point(ex.x, qd, one).squared_norm();
  }
  return out;
}

/// Gaussian elimination with partial pivoting.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-300) throw std::runtime_error("singular system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

inline double ridge_objective(const std::vector<double>& m, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    s += m[i] / q[i];
  }
  return s;
}

inline double lasso_objective(const std::vector<double>& m, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    s = std::max(s, m[i] / q[i]);
  }
  return s;
}

struct GridMinimum {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> q;
};

/// Minimum of an objective over the 2-simplex on a grid of the given step.
inline GridMinimum simplex_grid_min(const std::vector<double>& m, double step, bool ridge) {
  GridMinimum best;
  const auto n = static_cast<long>(std::llround(1.0 / step));
  for (long i = 1; i < n; ++i) {
    for (long j = 1; i + j < n; ++j) {
      const std::vector<double> q{static_cast<double>(i) / n, static_cast<double>(j) / n,
                                  static_cast<double>(n - i - j) / n};
      const double v = ridge ? ridge_objective(m, q) : lasso_objective(m, q);
      if (v < best.value) {
        best.value = v;
        best.q = q;
      }
    }
  }
  return best;
}

}  // namespace oracle
