#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fragchain/analytic.hpp"

using namespace fragchain;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// uniform_binary without closed forms, to exercise the Monte Carlo path.
class OpaqueUniform : public DislocationLaw {
 public:
  std::string name() const override { return "opaque_uniform"; }
  LawMetadata metadata() const override { return {true, false, 2}; }
  void draw_ratios(RngStream& rng, std::vector<double>& out) const override {
    const double v = rng.uniform();
    out = {v, 1.0 - v};
  }
};

}  // namespace

TEST_CASE("kappa of uniform_binary matches quadrature") {
  const KappaFunction kappa(uniform_binary());
  CHECK(kappa.closed_form());
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const double oracle = 1.0 - simpson([p](double v) { return std::pow(v, p) + std::pow(1.0 - v, p); }, 0.0, 1.0);
    CHECK(kappa(p) == doctest::Approx(oracle).epsilon(1e-9));
  }
  CHECK(kappa(1.0) == 0.0);
}

TEST_CASE("kappa derivatives") {
  const KappaFunction kappa(uniform_binary());
  for (double p : {1.0, 2.0, 3.0}) {
    CHECK(kappa.derivative(p, 1) == doctest::Approx(2.0 / ((p + 1) * (p + 1))).epsilon(1e-10));
    CHECK(kappa.derivative(p, 2) == doctest::Approx(-4.0 / std::pow(p + 1, 3)).epsilon(1e-10));
  }
  const KappaFunction eroded(uniform_binary(), {0.25});
  CHECK(eroded(2.0) == doctest::Approx(0.5 + 1.0 / 3.0));
  CHECK(eroded.derivative(2.0, 1) == doctest::Approx(0.25 + 2.0 / 9.0));
}

TEST_CASE("Monte Carlo kappa for a law without closed forms") {
  const KappaFunction kappa(std::make_shared<OpaqueUniform>());
  CHECK_FALSE(kappa.closed_form());
  for (double p : {1.5, 2.0, 3.0}) CHECK(kappa(p) == doctest::Approx(1.0 - 2.0 / (p + 1.0)).epsilon(2e-3));
  CHECK(kappa.malthusian() == 1.0);
}

TEST_CASE("exponents") {
  const KappaFunction kappa(uniform_binary());
  CHECK(kappa.malthusian() == 1.0);
  CHECK(kappa.p_bar() == doctest::Approx(1.0 + std::numbers::sqrt2).epsilon(1e-12));

  // Hand bisection on 1 - 2^{1-p}/(p+1).
  double lo = 0.1, hi = 2.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((1.0 - std::pow(2.0, 1.0 - mid) / (mid + 1.0)) < 0.0 ? lo : hi) = mid;
  }
  const KappaFunction lossy(lossy_binary());
  CHECK(lossy.malthusian() == doctest::Approx(lo).epsilon(1e-12));
  CHECK(lossy.malthusian() == doctest::Approx(0.457).epsilon(1e-3));
  CHECK_THROWS_AS(lossy.p_bar(), PreconditionError);

  // Erosion shifts the root above one for a conservative law.
  const KappaFunction eroded(uniform_binary(), {0.1});
  CHECK(eroded(eroded.malthusian()) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("bisect") {
  CHECK(bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0) == doctest::Approx(std::numbers::sqrt2).epsilon(1e-15));
  CHECK_THROWS_AS(bisect([](double x) { return x * x + 1.0; }, 0.0, 2.0), ConvergenceError);
}

TEST_CASE("moment series") {
  const KappaFunction kappa(uniform_binary());
  // alpha = 0 reduces to exp(-t kappa(p)).
  for (double t : {0.0, 0.5, 3.0}) CHECK(moment_series(kappa, 2.0, t, 0.0) == doctest::Approx(std::exp(-t / 3.0)).epsilon(1e-12));
  for (double t : {0.1, 1.0, 4.0, 10.0})
    CHECK(moment_series(kappa, 2.0, t, 1.0) == doctest::Approx(2.0 * (std::exp(-t) - 1.0 + t) / (t * t)).epsilon(1e-10));
  CHECK_THROWS_AS(moment_series(kappa, 2.0, 100.0, 1.0), ConvergenceError);
}

TEST_CASE("limit measure moments of uniform_binary are (k+1)!") {
  const auto rho = rho_moments(KappaFunction(uniform_binary()), 1.0, 5);
  double factorial = 1.0;
  for (std::size_t k = 1; k <= 5; ++k) {
    factorial *= static_cast<double>(k + 1);
    CHECK(rho.moments[k - 1] == doctest::Approx(factorial).epsilon(1e-10));
  }
  CHECK_THROWS_AS(rho_moments(KappaFunction(deterministic_binary(0.5)), 1.0, 2), PreconditionError);
  CHECK_THROWS_AS(rho_moments(KappaFunction(uniform_binary()), 0.0, 2), DomainError);
}

TEST_CASE("exit measure of uniform_binary has density 2x") {
  const KappaFunction kappa(uniform_binary());
  for (double x : {0.1, 0.5, 0.9}) CHECK(exit_density(kappa, x) == doctest::Approx(2.0 * x).epsilon(1e-12));
  const ExitMeasureModel model(kappa);
  CHECK(model.normalization() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(model.cdf(0.3) == doctest::Approx(0.09).epsilon(1e-10));
  CHECK_THROWS_AS(exit_density(kappa, 1.0), DomainError);

  // lossy: partial moment with pieces capped at 1/2, normalized by p*.
  const KappaFunction lossy(lossy_binary());
  CHECK(ExitMeasureModel(lossy).normalization() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("tagged fragment and reproduction intensity") {
  const KappaFunction kappa(uniform_binary());
  CHECK(tagged_laplace(kappa, 1.0, 3.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(reproduction_intensity(*uniform_binary(), 1.0) == doctest::Approx(2.0 * (1.0 - std::exp(-1.0))));
  CHECK(reproduction_intensity(*lossy_binary(), 0.5) == doctest::Approx(0.0));
}

TEST_CASE("adaptive quadrature") {
  CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
}

TEST_CASE("homogeneous moment series grid") {
  const KappaFunction kappa(uniform_binary());
  for (double p : {1.5, 2.0, 3.0})
    for (double t : {0.5, 1.0, 2.0})
      CHECK(std::abs(moment_series(kappa, p, t, 0.0) - std::exp(-t * kappa(p))) < 1e-10);
}

TEST_CASE("moment series starts with slope minus kappa") {
  const KappaFunction kappa(dirichlet_k(3, 1.0));
  const double h = 1e-6;
  for (double alpha : {0.0, 0.5, 1.0})
    for (double p : {1.5, 2.0}) {
      const double slope = (moment_series(kappa, p, h, alpha) - moment_series(kappa, p, -h, alpha)) / (2 * h);
      CHECK(std::abs(slope + kappa(p)) < 1e-6);
    }
}

TEST_CASE("kappa is increasing and concave") {
  for (const auto& law : {uniform_binary(), lossy_binary(), dirichlet_k(4, 0.5)}) {
    const KappaFunction kappa(law);
    double previous = -kInf;
    for (double p = 0.6; p < 8.0; p += 0.2) {
      CHECK(kappa(p) > previous);
      CHECK(kappa.derivative(p, 1) > 0.0);
      CHECK(kappa.derivative(p, 2) < 0.0);
      previous = kappa(p);
    }
  }
}

TEST_CASE("exponents do not depend on the bracket") {
  const KappaFunction lossy(lossy_binary());
  CHECK(std::abs(lossy.malthusian(Bracket{0.2, 3.0}) - lossy.malthusian(Bracket{0.05, 40.0})) < 1e-10);
  const KappaFunction uniform(uniform_binary());
  CHECK(std::abs(uniform.p_bar(Bracket{1.1, 10.0}) - uniform.p_bar(Bracket{1.5, 60.0})) < 1e-10);
}
