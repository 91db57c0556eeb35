#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fragchain/stats.hpp"

using namespace fragchain;

namespace {

std::vector<double> uniforms(RngStream& rng, std::size_t n) {
  std::vector<double> out(n);
  for (auto& u : out) u = rng.uniform();
  return out;
}

}  // namespace

TEST_CASE("mean and standard error") {
  const std::vector<double> v = {1, 2, 3, 4};
  const auto m = estimate_mean(v);
  CHECK(m.mean == 2.5);
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(m.n == 4);
}

TEST_CASE("quadrupling the sample halves the standard error") {
  RngStream rng(1, 0);
  const auto a = estimate_mean(uniforms(rng, 4000));
  const auto b = estimate_mean(uniforms(rng, 16000));
  CHECK(a.std_error / b.std_error == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("Kolmogorov distribution") {
  CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.0494).epsilon(0.01));
  CHECK(kolmogorov_survival(0.0) == doctest::Approx(1.0));
  CHECK(kolmogorov_survival(5.0) < 1e-15);
}

TEST_CASE("KS statistic") {
  RngStream rng(2, 0);
  const auto a = uniforms(rng, 100);
  CHECK(ks_statistic(a, a) == 0.0);
  const std::vector<double> half = {0.25};
  CHECK(ks_statistic(half, [](double x) { return x; }) == doctest::Approx(0.75));
  const std::vector<double> small(10, 0.5);
  CHECK_THROWS_AS(ks_test(small, small), DomainError);
}

TEST_CASE("KS test is calibrated") {
  RngStream rng(3, 0);
  int passed = 0;
  for (int i = 0; i < 1000; ++i) passed += ks_test(uniforms(rng, 100), uniforms(rng, 100)).pass;
  CHECK(passed >= 980);
  const auto shifted = uniforms(rng, 500);
  std::vector<double> moved = shifted;
  for (auto& x : moved) x += 0.3;
  CHECK_FALSE(ks_test(shifted, moved).pass);
}

TEST_CASE("chi-square tests") {
  const std::vector<double> counts = {10, 20, 30}, expected = {20, 20, 20};
  const auto r = chi2_test(counts, expected);
  CHECK(r.statistic == doctest::Approx(10.0));
  CHECK(r.p_value == doctest::Approx(std::exp(-5.0)).epsilon(1e-10));
  CHECK_FALSE(r.pass);
  const std::vector<double> a = {50, 50}, b = {100, 100};
  CHECK(chi2_homogeneity(a, b).statistic == doctest::Approx(0.0));
  CHECK(chi2_homogeneity(a, b).pass);
  const std::vector<double> bad = {1};
  CHECK_THROWS_AS(chi2_test(bad, bad), DomainError);
}

TEST_CASE("effective sample size and resampling") {
  const std::vector<double> equal(50, 2.0);
  CHECK(effective_sample_size(equal) == doctest::Approx(50.0));
  const std::vector<double> one_heavy = {1.0, 0.0, 0.0};
  CHECK(effective_sample_size(one_heavy) == doctest::Approx(1.0));

  RngStream rng(4, 0);
  const std::vector<double> values = {0.1, 0.9}, weights = {1.0, 0.0};
  for (double v : resample_weighted(values, weights, rng)) CHECK(v == 0.1);
  const std::vector<double> negative = {-1.0, 2.0};
  CHECK_THROWS_AS(resample_weighted(values, negative, rng), DomainError);
}

TEST_CASE("report CSV") {
  TestReport r;
  r.criterion = "X";
  r.statistic = 1.5;
  r.pass = true;
  std::ostringstream os;
  write_report_csv(os, std::span<const TestReport>(&r, 1));
  CHECK(os.str().find("criterion_id,statistic,expected,tolerance,p_value,pass") == 0);
  CHECK(os.str().find("nan") != std::string::npos);
}
