#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "budgetreg/datagen.hpp"
#include "budgetreg/harness.hpp"

using namespace budgetreg;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.algorithms = {Algorithm::aerr, Algorithm::ddaerr, Algorithm::ogd_full};
  c.dim = 6;
  c.alpha = -1.0;
  c.m_total = 300;
  c.k = 2;
  c.repeats = 3;
  c.prefixes = {40, 120};
  c.folds = 4;
  c.eta_grid = {0.01, 0.1, 1.0};
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("algorithm names") {
  for (Algorithm a : all_algorithms()) CHECK(parse_algorithm(algorithm_name(a)) == a);
  CHECK(parse_algorithm("erm-ridge") == Algorithm::erm_ridge);
  CHECK(algorithm_name(Algorithm::two_phase_ddaelr) == "2p-ddaelr");
  CHECK_THROWS_WITH_AS(parse_algorithm("sgd"), "unknown algorithm 'sgd'", std::invalid_argument);
  CHECK(algorithm_regime(Algorithm::ddaelr) == Regime::linf);
  CHECK(is_budgeted(Algorithm::adagrad_aerr));
  CHECK_FALSE(is_budgeted(Algorithm::eg_full));
}

TEST_CASE("relative loss") {
  const std::vector<Example> test{{{1.0, 0.0}, 2.0}, {{0.0, 1.0}, 0.0}};
  CHECK(relative_loss(std::vector<double>{0, 0}, test) == 1.0);
  const std::vector<Example> one{{{1.0}, 2.0}};
  CHECK(relative_loss(std::vector<double>{1.0}, one) == doctest::Approx(0.25));
  CHECK(relative_loss(std::vector<double>{2.0, 0.0}, test) == 0.0);
  const std::vector<Example> zero{{{1.0}, 0.0}};
  CHECK_THROWS_WITH_AS(relative_loss(std::vector<double>{1.0}, zero),
                       "zero-predictor loss undefined", std::invalid_argument);
}

TEST_CASE("budget split") {
  CHECK(split_budget(4, std::nullopt).point_draws == 4);
  CHECK(split_budget(4, std::nullopt).inner_draws == 1);
  const auto half = split_budget(4, 0.5);
  CHECK(half.point_draws + half.inner_draws == 5);
  CHECK(half.point_draws >= 2);
  CHECK(split_budget(1, 0.9).point_draws == 1);
  CHECK(split_budget(1, 0.9).inner_draws == 1);
  CHECK(split_budget(9, 0.01).point_draws == 1);
  CHECK(split_budget(9, 0.99).point_draws == 9);
  CHECK_THROWS_AS(split_budget(0, std::nullopt), std::invalid_argument);
  CHECK_THROWS_AS(split_budget(3, 1.0), std::invalid_argument);
}

TEST_CASE("dataset moments") {
  const std::vector<Example> data{{{1.0, 0.0}, 0.0}, {{0.5, -1.0}, 0.0}};
  const auto m = dataset_moments(data);
  CHECK(m[0] == doctest::Approx(0.625));
  CHECK(m[1] == doctest::Approx(0.5));
}

TEST_CASE("cross validation") {
  const SyntheticData s = generate_synthetic(5, -1.0, Regime::l2, 200, 3);
  TrainParams p;
  p.bound = norm(s.target_weights, NormKind::two);
  p.k = 2;
  const std::vector<double> single{0.3};
  CHECK(cross_validate(s.dataset.examples, Algorithm::aerr, p, single, 5, 1).best_eta == 0.3);

  const std::vector<double> grid{0.5, 0.05, 0.5, 0.005};
  const auto cv = cross_validate(s.dataset.examples, Algorithm::ddaerr, p, grid, 5, 2);
  CHECK(cv.mean_loss[0] == cv.mean_loss[2]);
  const auto best = std::min_element(cv.mean_loss.begin(), cv.mean_loss.end());
  CHECK(cv.best_eta == grid[static_cast<std::size_t>(best - cv.mean_loss.begin())]);
  CHECK(cross_validate(s.dataset.examples, Algorithm::ddaerr, p, grid, 5, 2).mean_loss ==
        cv.mean_loss);

  const std::vector<double> twins{0.2, 0.1};
  const std::vector<Example> flat(20, Example{{0.5, 0.0, 0.0, 0.0, 0.0}, 0.0});
  std::vector<Example> tied = flat;
  tied[0].y = 0.0;
  TrainParams erm = p;
  CHECK_THROWS_AS(cross_validate(flat, Algorithm::aerr, erm, twins, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(cross_validate(flat, Algorithm::aerr, erm, twins, 1, 1), std::invalid_argument);
}

TEST_CASE("parallel for") {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_WITH(parallel_for(10, 3,
                                 [](std::size_t i) {
                                   if (i == 7) throw std::runtime_error("seven");
                                   if (i == 9) throw std::runtime_error("nine");
                                 }),
                    "seven");
}

TEST_CASE("experiment records and budgets") {
  const ExperimentConfig c = small_config();
  const ExperimentResult r = run_experiment(c, 1);
  CHECK(r.train_size == 240);
  CHECK(r.test_size == 60);
  CHECK(r.records.size() == 3 * 2 * 3);
  for (const RunRecord& rec : r.records) {
    if (is_budgeted(rec.algorithm)) {
      CHECK(rec.attributes_observed == rec.m * (c.k + 1));
    } else {
      CHECK(rec.attributes_observed == rec.m * c.dim);
    }
    CHECK(std::isfinite(rec.test_relative_loss));
  }
  REQUIRE(r.curves.size() == 3);
  for (const LearningCurve& curve : r.curves) {
    REQUIRE(curve.points.size() == 2);
    CHECK(curve.points[0].attributes_observed <= curve.points[1].attributes_observed);
  }
  const auto& aerr = r.curves[0].points[1];
  double mean = 0.0;
  for (const RunRecord& rec : r.records) {
    if (rec.algorithm == Algorithm::aerr && rec.m == 120) mean += rec.test_relative_loss / 3;
  }
  CHECK(aerr.mean == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("budget parity between the budgeted algorithms") {
  ExperimentConfig c = small_config();
  c.algorithms = {Algorithm::aerr, Algorithm::ddaerr, Algorithm::two_phase_ddaerr};
  c.eta_mode = EtaMode::theory;
  const ExperimentResult r = run_experiment(c, 1);
  for (const RunRecord& rec : r.records) CHECK(rec.attributes_observed == rec.m * 3);
}

TEST_CASE("experiments are deterministic across worker counts") {
  const ExperimentConfig c = small_config();
  const ExperimentResult a = run_experiment(c, 1);
  const ExperimentResult b = run_experiment(c, 4);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].seed == b.records[i].seed);
    CHECK(a.records[i].test_relative_loss == b.records[i].test_relative_loss);
    CHECK(a.records[i].eta == b.records[i].eta);
  }
}

TEST_CASE("experiment validation") {
  ExperimentConfig c = small_config();
  c.prefixes = {1000};
  CHECK_THROWS_WITH_AS(run_experiment(c), "prefix 1000 exceeds the training split (240 examples)",
                       std::invalid_argument);
  c = small_config();
  c.algorithms.push_back(Algorithm::aelr);
  CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
  c = small_config();
  c.eta_grid.clear();
  CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
}
