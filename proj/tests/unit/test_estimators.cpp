#include <doctest.h>

#include <cmath>

#include "fragchain/estimators.hpp"

using namespace fragchain;

namespace {

SimConfig screened(double epsilon) {
  SimConfig cfg;
  cfg.law = uniform_binary();
  cfg.mode = SimMode::threshold;
  cfg.epsilon = epsilon;
  cfg.seed = 31;
  cfg.replicas = 2000;
  return cfg;
}

}  // namespace

TEST_CASE("continuation keeps the total mass of a conservative law") {
  const auto cfg = screened(0.01);
  for (std::size_t r = 0; r < 20; ++r)
    CHECK(weighted_empirical(cfg, r, 3.0, 1.0).total_weight() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("continuation is unbiased for power sums") {
  const auto cfg = screened(0.05);
  std::vector<double> values;
  for (std::size_t r = 0; r < cfg.replicas; ++r) values.push_back(weighted_empirical(cfg, r, 2.0, 2.0).total_weight());
  const auto m = estimate_mean(values);
  CHECK(std::abs(m.mean - std::exp(-2.0 / 3.0)) < 4.0 * m.std_error);
}

TEST_CASE("law of large numbers functional") {
  auto cfg = screened(0.01);
  cfg.replicas = 200;
  // κ'(1) = 1/2 for uniform_binary, so t^{-1} ln X concentrates at -1/2.
  const auto m = lln_functional(cfg, 8.0, clamped_identity);
  CHECK(m.mean == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(clamped_identity(-5.0) == -3.0);
  CHECK(clamped_identity(0.5) == 0.0);
}

TEST_CASE("estimator guards") {
  auto cfg = screened(0.01);
  cfg.replicas = 1;
  CHECK_THROWS_AS(lln_functional(cfg, 1.0, clamped_identity), DomainError);
  cfg.replicas = 4;
  cfg.alpha = 0.5;
  CHECK_THROWS_AS(lln_functional(cfg, 1.0, clamped_identity), PreconditionError);
  CHECK_THROWS_AS(lln_functional(screened(0.01), -1.0, clamped_identity), DomainError);

  auto geometric = screened(0.01);
  geometric.law = deterministic_binary(0.5);
  CHECK_THROWS_AS(clt_functional(geometric, 1.0), PreconditionError);

  CHECK_THROWS_AS(scaled_moment(screened(0.01), 1.0, 1), PreconditionError);
  CHECK_THROWS_AS(largest_rate(screened(0.01), 10.0), PreconditionError);

  auto eroded = screened(0.01);
  eroded.erosion = 0.1;
  const std::vector<double> times = {1.0};
  CHECK_THROWS_AS(additive_martingale(eroded, 2.0, times), PreconditionError);
  const std::vector<double> unsorted = {2.0, 1.0};
  CHECK_THROWS_AS(additive_martingale(screened(0.01), 2.0, unsorted), DomainError);
}

TEST_CASE("additive martingale has unit mean") {
  auto cfg = screened(0.01);
  cfg.replicas = 400;
  const std::vector<double> times = {0.5, 1.0, 2.0};
  const auto series = additive_martingale(cfg, 2.0, times);
  REQUIRE(series.size() == 400);
  for (std::size_t j = 0; j < times.size(); ++j) {
    std::vector<double> column;
    for (const auto& s : series) column.push_back(s[j]);
    const auto m = estimate_mean(column);
    CHECK(std::abs(m.mean - 1.0) < 4.0 * m.std_error);
  }
}

TEST_CASE("largest fragment rate is negative and above the tagged speed") {
  SimConfig cfg;
  cfg.law = uniform_binary();
  cfg.mode = SimMode::threshold;
  cfg.epsilon = 1e-5;
  cfg.replicas = 20;
  cfg.seed = 3;
  const auto m = largest_rate(cfg, 5.0);
  CHECK(m.mean < 0.0);
  CHECK(m.mean > -0.5);
}

TEST_CASE("scaled moment for a self-similar law") {
  SimConfig cfg;
  cfg.law = uniform_binary();
  cfg.alpha = 1.0;
  cfg.horizon = 1.0;
  cfg.replicas = 50;
  cfg.seed = 5;
  const auto m = scaled_moment(cfg, 2.0, 1);
  CHECK(m.mean > 0.0);
  CHECK(std::isfinite(m.std_error));
}

TEST_CASE("weighted total is one at every snapshot of a conservative exact run") {
  SimConfig cfg;
  cfg.law = dirichlet_k(3, 1.0);
  cfg.horizon = 2.0;
  cfg.snapshot_times = {0.5, 1.0, 2.0};
  cfg.seed = 2;
  for (std::size_t r = 0; r < 10; ++r) {
    const auto log = run(cfg, r);
    for (const auto& snap : log.snapshots())
      CHECK(weighted_empirical(log, snap.time, 1.0).total_weight() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("standard error scales with the square root of the replica count") {
  auto cfg = screened(0.01);
  cfg.replicas = 100;
  const auto small = lln_functional(cfg, 6.0, [](double x) { return x; });
  cfg.replicas = 400;
  const auto large = lln_functional(cfg, 6.0, [](double x) { return x; });
  CHECK(small.std_error / large.std_error == doctest::Approx(2.0).epsilon(0.2));
}
