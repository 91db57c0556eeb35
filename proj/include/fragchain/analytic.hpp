#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fragchain/laws.hpp"

namespace fragchain {

struct Bracket {
  double lo;
  double hi;
};

/// κ(p) = c·p + 1 - E[Σ s_i^p] with the exponents derived from it.
///
/// Copies share one cache for the Malthusian exponent p* and for p̄, which
/// are computed on first use.
class KappaFunction {
 public:
  explicit KappaFunction(LawPtr law, ErosionParams erosion = {});

  double operator()(double p) const { return value(p); }
  double value(double p) const;
  /// First or second derivative in p.
  double derivative(double p, int order = 1) const;

  double underline_p() const { return law_->underline_p(); }
  const DislocationLaw& law() const { return *law_; }
  const LawPtr& law_ptr() const { return law_; }
  double erosion() const { return erosion_.c; }
  /// True when κ is evaluated from closed forms (no Monte Carlo).
  bool closed_form() const { return closed_form_; }

  /// Root of κ. Conservative laws without erosion return exactly 1.
  double malthusian() const;
  double malthusian(Bracket initial) const;

  /// Unique maximiser of κ(p)/p, i.e. the root of p κ'(p) - κ(p) on (1, ∞).
  /// Requires c = 0 and a conservative law.
  double p_bar() const;
  double p_bar(Bracket initial) const;

 private:
  struct Cache;
  double sigma(double p, int order) const;

  LawPtr law_;
  ErosionParams erosion_;
  bool closed_form_;
  std::shared_ptr<Cache> cache_;
};

/// Default search bracket [max(underline_p + 1e-6, 1e-3), 64].
Bracket default_bracket(const KappaFunction& kappa);

/// Bisection on a continuous function with a sign change in [lo, hi];
/// runs to full double resolution.
double bisect(const std::function<double(double)>& f, double lo, double hi);

/// E[Σ X_i^p(t)] for index alpha from the alternating series
/// Σ_n (-t)^n / n! · Π_{k<n} κ(p + αk).
///
/// Valid while |t|·max_k |κ(p + αk)| ≤ 30 (200 terms at most) and while
/// rounding in the partial sums stays below the 1e-10 remainder budget;
/// outside that range a ConvergenceError is raised.
double moment_series(const KappaFunction& kappa, double p, double t, double alpha);

/// ∫ y^{αk} ρ(dy), k = 1..K, for the limit measure of t^{1/α} X(t).
struct LimitMeasureRho {
  double alpha = 0.0;
  std::vector<double> moments;
};
LimitMeasureRho rho_moments(const KappaFunction& kappa, double alpha, std::size_t max_k);

/// Limit ϱ of the weighted exit measure, as a density on (0, 1).
class ExitMeasureModel {
 public:
  explicit ExitMeasureModel(KappaFunction kappa);

  double density(double x) const;
  /// ϱ((0, x]) by adaptive quadrature.
  double cdf(double x) const;
  /// ∫_0^1 density; one up to quadrature error.
  double normalization() const { return normalization_; }

 private:
  KappaFunction kappa_;
  double p_star_;
  double kappa_prime_;
  double normalization_;
};

/// E[Σ 1{s_i < x} s_i^{p*}] / (x κ'(p*)).
double exit_density(const KappaFunction& kappa, double x);

/// E[χ(t)^q] = exp(-t κ(q + 1)) for the tagged fragment.
double tagged_laplace(const KappaFunction& kappa, double q, double t);

/// μ(t) = E[Σ 1{s_i ≥ e^{-t}}], expected number of children born by log-time t.
double reproduction_intensity(const DislocationLaw& law, double t);

/// Adaptive Gauss-Kronrod quadrature on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

}  // namespace fragchain
