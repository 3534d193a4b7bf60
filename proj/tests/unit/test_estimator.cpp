#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

#include "budgetreg/estimator.hpp"

using namespace budgetreg;

namespace {

std::vector<double> rational_probs(std::mt19937_64& gen, std::size_t d) {
  std::uniform_int_distribution<int> weight(1, 5);
  std::vector<double> w(d);
  double total = 0.0;
  for (double& v : w) total += v = weight(gen);
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

TEST_CASE("point estimate examples") {
  const auto one = AttributeDistribution::uniform(1);
  const std::vector<double> draws{0.1, 0.5, 0.9};
  const auto e = estimate_point(std::vector<double>{0.5}, one, draws);
  REQUIRE(e.entries.size() == 1);
  CHECK(e.entries[0].first == 0);
  CHECK(e.entries[0].second == doctest::Approx(0.5));

  const auto q = AttributeDistribution::from_weights(std::vector<double>{1, 0});
  for (double u : {0.0, 0.4, 0.99}) {
    const std::vector<double> d1{u};
    const auto s = estimate_point(std::vector<double>{0.3, 0.0}, q, d1);
    CHECK(s.dense() == std::vector<double>{0.3, 0.0});
  }

  const std::vector<double> x{0.2, -0.4, 0.6};
  const std::vector<double> probs{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::vector<double> mean(3, 0.0);
  oracle::enumerate_tuples(probs, 2, [&](const std::vector<std::size_t>& t, double weight) {
    const auto mid = oracle::bin_midpoints(probs);
    const std::vector<double> draws2{mid[t[0]], mid[t[1]]};
    const auto dense = estimate_point(x, AttributeDistribution::uniform(3), draws2).dense();
    for (std::size_t i = 0; i < 3; ++i) mean[i] += weight * dense[i];
  });
  for (std::size_t i = 0; i < 3; ++i) CHECK(mean[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("duplicate draws merge") {
  const std::vector<double> draws{0.1, 0.2, 0.7};
  const auto e = estimate_point(std::vector<double>{1.0, 1.0}, AttributeDistribution::uniform(2),
                                draws);
  REQUIRE(e.entries.size() == 2);
  CHECK(e.dense()[0] == doctest::Approx(4.0 / 3));
  CHECK(e.dense()[1] == doctest::Approx(2.0 / 3));
}

TEST_CASE("inner product estimate examples") {
  const std::vector<double> none;
  const auto zero = estimate_inner_product(std::vector<double>{1.0}, 2.0, std::vector<double>{0.0},
                                           std::nullopt, none);
  CHECK(zero.phi == -2.0);
  CHECK(zero.consumed == 0);

  const std::vector<double> u{0.3};
  const auto single = estimate_inner_product(std::vector<double>{0.8}, 0.0,
                                             std::vector<double>{0.5},
                                             AttributeDistribution::uniform(1), u);
  CHECK(single.phi == doctest::Approx(0.4));
  CHECK(single.consumed == 1);

  const std::vector<double> x{0.2, 0.6};
  const std::vector<double> w{1, 1};
  const auto p = AttributeDistribution::uniform(2);
  double mean = 0.0;
  for (double draw : {0.25, 0.75}) {
    const std::vector<double> d1{draw};
    mean += 0.5 * estimate_inner_product(x, 0.1, w, p, d1).phi;
  }
  CHECK(mean == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("gradient estimate examples") {
  const Example ex{{0.5, -0.5}, 2.0};
  const std::vector<double> draws{0.1, 0.8, 0.3};
  const std::vector<double> none;
  const auto g = gradient_estimate(ex, std::vector<double>{0, 0}, AttributeDistribution::uniform(2),
                                   std::nullopt, draws, none);
  const auto xt = estimate_point(ex.x, AttributeDistribution::uniform(2), draws).dense();
  CHECK(g.phi == -2.0);
  CHECK(g.dense()[0] == doctest::Approx(-2.0 * xt[0]));
  CHECK(g.dense()[1] == doctest::Approx(-2.0 * xt[1]));
  CHECK(g.attributes_consumed == 3);

  const std::vector<double> inner{0.5};
  const auto full = gradient_estimate(ex, std::vector<double>{1, 0},
                                      AttributeDistribution::uniform(2),
                                      AttributeDistribution::uniform(2), draws, inner);
  CHECK(full.attributes_consumed == 4);

  const Example small{{0.3, 0.9}, 0.2};
  const auto e = oracle::enumerate_gradient(small, {1, 0}, {0.5, 0.5},
                                            std::vector<double>{1.0, 0.0}, 1);
  const double residual = 0.3 - 0.2;
  CHECK(e.mean_gradient[0] == doctest::Approx(residual * 0.3).epsilon(1e-12));
  CHECK(e.mean_gradient[1] == doctest::Approx(residual * 0.9).epsilon(1e-12));
}

TEST_CASE("unbiasedness and variance identities by enumeration") {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (std::size_t d = 1; d <= 4; ++d) {
    for (std::size_t k = 1; k <= 2; ++k) {
      for (int trial = 0; trial < 10; ++trial) {
        Example ex;
        ex.x.resize(d);
        for (double& v : ex.x) v = coord(gen);
        ex.y = coord(gen);
        std::vector<double> w(d);
        for (double& v : w) v = coord(gen);
        const auto q = rational_probs(gen, d);
        const auto p = rational_probs(gen, d);
        const auto e = oracle::enumerate_gradient(ex, w, q, p, k);
        REQUIRE(e.total_probability == doctest::Approx(1.0).epsilon(1e-12));

        double residual = -ex.y;
        double x_sq = 0.0;
        double single_sq = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          residual += w[i] * ex.x[i];
          x_sq += ex.x[i] * ex.x[i];
          single_sq += ex.x[i] * ex.x[i] / q[i];
        }
        for (std::size_t i = 0; i < d; ++i) {
          CHECK(std::abs(e.mean_gradient[i] - residual * ex.x[i]) <= 1e-12);
        }
        CHECK(std::abs(e.mean_phi - residual) <= 1e-12);
        CHECK(e.mean_single_sq == doctest::Approx(single_sq).epsilon(1e-12));
        const double identity =
            e.mean_single_sq / static_cast<double>(k) + (k - 1.0) / static_cast<double>(k) * x_sq;
        CHECK(e.mean_point_sq == doctest::Approx(identity).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("phi second moment is bounded by 4B^2") {
  std::mt19937_64 gen(43);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 4;
    const double B = 0.5 + 2.0 * unit(gen);
    Example ex;
    ex.x.resize(d);
    std::vector<double> w(d);
    for (double& v : ex.x) v = normal(gen);
    for (double& v : w) v = normal(gen);
    const double xn = norm(ex.x, NormKind::two);
    const double wn = norm(w, NormKind::two);
    const double xs = unit(gen) / xn;
    const double ws = B * unit(gen) / wn;
    for (double& v : ex.x) v *= xs;
    for (double& v : w) v *= ws;
    ex.y = B * (2.0 * unit(gen) - 1.0);
    if (norm(w, NormKind::one) == 0.0) continue;
    const auto p = inner_product_p(w, Regime::l2).probabilities();
    const auto e = oracle::enumerate_gradient(ex, w, AttributeDistribution::uniform(d).probabilities(),
                                              p, 1);
    CHECK(e.mean_phi_sq <= 4.0 * B * B + 1e-12);
  }
}

TEST_CASE("observer sees every point draw") {
  const Example ex{{0.1, 0.2, 0.3}, 0.0};
  const std::vector<double> draws{0.0, 0.5, 0.9, 0.5};
  std::vector<std::size_t> seen;
  estimate_point(ex.x, AttributeDistribution::uniform(3), draws,
                 [&](std::size_t i, double value) {
                   seen.push_back(i);
                   CHECK(value == ex.x[i]);
                 });
  CHECK(seen == std::vector<std::size_t>{0, 1, 2, 1});
}
