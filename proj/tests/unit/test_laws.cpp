#include <doctest.h>

#include <cmath>

#include "fragchain/laws.hpp"
#include "fragchain/stats.hpp"

using namespace fragchain;

namespace {

// E Σ s_i^p for symmetric Dirichlet(a,...,a) with k parts.
double dirichlet_sigma(double k, double a, double p) {
  return k * std::exp(std::lgamma(a + p) + std::lgamma(k * a) - std::lgamma(a) - std::lgamma(k * a + p));
}

}  // namespace

TEST_CASE("built-in samplers produce ranked ratios") {
  RngStream rng(5, 0);
  std::vector<double> logs;
  for (int i = 0; i < 1000; ++i) {
    uniform_binary()->sample_log_ratios(rng, logs);
    REQUIRE(logs.size() == 2);
    CHECK(logs[0] >= logs[1]);
    CHECK(std::exp(logs[0]) + std::exp(logs[1]) == doctest::Approx(1.0).epsilon(1e-14));

    lossy_binary()->sample_log_ratios(rng, logs);
    REQUIRE(logs.size() == 2);
    CHECK(logs[0] == logs[1]);
    CHECK(std::exp(logs[0]) <= 0.5);

    dirichlet_k(4, 0.5)->sample_log_ratios(rng, logs);
    CHECK(logs.size() <= 4);
    double total = 0.0;
    for (double l : logs) total += std::exp(l);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto det = deterministic_binary(0.3)->sample(rng);
  CHECK(det.size_at(0) == doctest::Approx(0.7));
  CHECK(det.size_at(1) == doctest::Approx(0.3));
}

TEST_CASE("law metadata") {
  CHECK(uniform_binary()->metadata().conservative);
  CHECK_FALSE(uniform_binary()->metadata().geometric);
  CHECK_FALSE(lossy_binary()->metadata().conservative);
  CHECK(deterministic_binary(0.5)->metadata().geometric);
  CHECK(deterministic_binary(0.2)->metadata().geometric == false);
  CHECK(*dirichlet_k(3)->metadata().max_children == 3);
}

TEST_CASE("make_law resolves names and parameters") {
  CHECK(make_law("uniform_binary")->name() == "uniform_binary");
  CHECK(make_law("deterministic_binary", {{"r", 0.25}})->params().at("r") == 0.25);
  CHECK(make_law("dirichlet_k", {{"k", 3}, {"a", 2}})->name() == "dirichlet_k");
  CHECK_THROWS_AS(make_law("nope"), UnknownLawError);
  CHECK_THROWS_AS(make_law("uniform_binary", {{"r", 0.5}}), UnknownLawError);
  CHECK_THROWS_AS(make_law("dirichlet_k", {{"k", 2.5}}), DomainError);
  CHECK_THROWS_AS(deterministic_binary(1.0), DomainError);
}

TEST_CASE("sigma_moment closed forms match hand formulas") {
  for (double p : {0.5, 1.0, 2.0, 3.5}) {
    CHECK(sigma_moment(*uniform_binary(), p).value == doctest::Approx(2.0 / (p + 1.0)).epsilon(1e-14));
    CHECK(sigma_moment(*lossy_binary(), p).value == doctest::Approx(2.0 * std::pow(0.5, p) / (p + 1.0)).epsilon(1e-14));
    CHECK(sigma_moment(*dirichlet_k(3, 2.0), p).value == doctest::Approx(dirichlet_sigma(3, 2, p)).epsilon(1e-12));
  }
  CHECK(sigma_moment(*uniform_binary(), 1.0).value == 1.0);
  CHECK_THROWS_AS(sigma_moment(*uniform_binary(), 0.0), DomainError);
}

TEST_CASE("Dirichlet sampler agrees with its closed-form moments") {
  const auto law = dirichlet_k(3, 2.0);
  for (double p : {0.7, 2.0}) {
    const auto mc = monte_carlo_over_law(*law, [p](const MassPartition& s) {
      double total = 0.0;
      for (double x : s.sizes()) total += std::pow(x, p);
      return total;
    });
    CHECK_FALSE(mc.closed_form);
    CHECK(std::abs(mc.value - dirichlet_sigma(3, 2, p)) < 4.0 * mc.std_error + 1e-12);
  }
}

TEST_CASE("erosion parameters") {
  CHECK_NOTHROW(ErosionParams{0.0}.validate());
  CHECK_THROWS_AS(ErosionParams{-1.0}.validate(), DomainError);
}

TEST_CASE("sample power sums agree with sigma_moment") {
  for (const auto& law : {uniform_binary(), lossy_binary(), deterministic_binary(0.3), dirichlet_k(3, 1.0)}) {
    RngStream rng(17, 0);
    for (double p : {1.0, 2.0, 3.0}) {
      std::vector<double> values;
      for (int i = 0; i < 100'000; ++i) {
        double total = 0.0;
        for (double s : law->sample(rng).sizes()) total += std::pow(s, p);
        values.push_back(total);
      }
      const auto m = estimate_mean(values);
      CHECK(std::abs(m.mean - sigma_moment(*law, p).value) <= 4.0 * m.std_error + 1e-12);
    }
  }
  CHECK_FALSE(lossy_binary()->metadata().geometric);
}
