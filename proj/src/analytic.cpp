#include "fragchain/analytic.hpp"

#include <cmath>
#include <exception>
#include <mutex>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fragchain {

namespace {

// Common-random-number bank for laws without closed forms: κ is evaluated on
// the same draws for every p, so it stays smooth enough for differentiation
// and bisection.
constexpr std::size_t kBankSize = 1u << 17;

struct RootCache {
  std::once_flag once;
  double value = 0.0;
  std::exception_ptr error;
};

}  // namespace

struct KappaFunction::Cache {
  std::once_flag bank_once;
  std::vector<std::vector<double>> bank;
  RootCache p_star;
  RootCache p_bar;
};

KappaFunction::KappaFunction(LawPtr law, ErosionParams erosion)
    : law_(std::move(law)), erosion_(erosion), cache_(std::make_shared<Cache>()) {
  if (!law_) throw PreconditionError("kappa: null law");
  erosion_.validate();
  closed_form_ = law_->sigma_moment_closed(1.0 + law_->underline_p(), 0).has_value();
}

double KappaFunction::sigma(double p, int order) const {
  if (closed_form_) return *law_->sigma_moment_closed(p, order);
  std::call_once(cache_->bank_once, [this] {
    RngStream rng(0xba4cULL, std::hash<std::string>{}(law_->name()));
    cache_->bank.reserve(kBankSize);
    std::vector<double> logs;
    for (std::size_t i = 0; i < kBankSize; ++i) {
      law_->sample_log_ratios(rng, logs);
      cache_->bank.push_back(logs);
    }
  });
  double total = 0.0;
  for (const auto& draw : cache_->bank)
    for (double l : draw) total += std::pow(l, order) * std::exp(p * l);
  return total / static_cast<double>(kBankSize);
}

double KappaFunction::value(double p) const {
  if (!(p > underline_p())) throw DomainError("kappa: p must exceed underline_p");
  if (p == 1.0 && law_->metadata().conservative) return erosion_.c;
  return erosion_.c * p + 1.0 - sigma(p, 0);
}

double KappaFunction::derivative(double p, int order) const {
  if (!(p > underline_p())) throw DomainError("kappa: p must exceed underline_p");
  if (order != 1 && order != 2) throw DomainError("kappa: derivative order must be 1 or 2");
  if (closed_form_) {
    const double d = -sigma(p, order);
    return order == 1 ? erosion_.c + d : d;
  }
  // Central differences with one Richardson step.
  const double h = std::min(1e-4, 0.25 * (p - underline_p()));
  const auto diff = [&](double step) {
    if (order == 1) return (value(p + step) - value(p - step)) / (2.0 * step);
    return (value(p + step) - 2.0 * value(p) + value(p - step)) / (step * step);
  };
  return (4.0 * diff(0.5 * h) - diff(h)) / 3.0;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) throw ConvergenceError("bisect: no sign change in bracket");
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Bracket default_bracket(const KappaFunction& kappa) {
  return {std::max(kappa.underline_p() + 1e-6, 1e-3), 64.0};
}

double KappaFunction::malthusian() const {
  std::call_once(cache_->p_star.once, [this] {
    try {
      cache_->p_star.value = malthusian(default_bracket(*this));
    } catch (...) {
      cache_->p_star.error = std::current_exception();
    }
  });
  if (cache_->p_star.error) std::rethrow_exception(cache_->p_star.error);
  return cache_->p_star.value;
}

double KappaFunction::malthusian(Bracket b) const {
  if (law_->metadata().conservative && erosion_.c == 0.0) return 1.0;
  const double floor = underline_p();
  if (!(b.lo > floor) || !(b.hi > b.lo)) throw DomainError("malthusian: invalid bracket");
  for (int i = 0; i < 200 && value(b.lo) > 0.0; ++i) b.lo = floor + 0.5 * (b.lo - floor);
  for (int i = 0; i < 60 && value(b.hi) < 0.0; ++i) b.hi *= 2.0;
  if (value(b.lo) > 0.0 || value(b.hi) < 0.0)
    throw ConvergenceError("malthusian: kappa has no sign change; Malthusian hypothesis fails");
  return bisect([this](double p) { return value(p); }, b.lo, b.hi);
}

double KappaFunction::p_bar() const {
  std::call_once(cache_->p_bar.once, [this] {
    try {
      cache_->p_bar.value = p_bar(Bracket{1.0, 64.0});
    } catch (...) {
      cache_->p_bar.error = std::current_exception();
    }
  });
  if (cache_->p_bar.error) std::rethrow_exception(cache_->p_bar.error);
  return cache_->p_bar.value;
}

double KappaFunction::p_bar(Bracket b) const {
  if (erosion_.c != 0.0 || !law_->metadata().conservative)
    throw PreconditionError("p_bar: requires a conservative law without erosion");
  const auto g = [this](double p) { return p * derivative(p, 1) - value(p); };
  b.lo = std::max(b.lo, 1.0);
  for (int i = 0; i < 60 && g(b.hi) > 0.0; ++i) b.hi *= 2.0;
  if (g(b.lo) < 0.0 || g(b.hi) > 0.0) throw ConvergenceError("p_bar: no sign change of p kappa' - kappa");
  return bisect(g, b.lo, b.hi);
}

double moment_series(const KappaFunction& kappa, double p, double t, double alpha) {
  constexpr int kMaxTerms = 200;
  constexpr double kRange = 30.0;
  constexpr double kBudget = 1e-10;
  if (t == 0.0) return 1.0;

  std::vector<double> factors;
  factors.reserve(kMaxTerms);
  double kmax = 0.0;
  for (int k = 0; k < kMaxTerms; ++k) {
    const double q = p + alpha * k;
    if (!(q > kappa.underline_p())) {
      if (k == 0) throw DomainError("moment_series: p must exceed underline_p");
      break;
    }
    factors.push_back(kappa(q));
    kmax = std::max(kmax, std::abs(factors.back()));
  }
  if (std::abs(t) * kmax > kRange)
    throw ConvergenceError("moment_series: t outside the validated range |t| max kappa <= 30");

  // Neumaier-compensated sum in extended precision.
  long double sum = 1.0L, comp = 0.0L, term = 1.0L, largest = 1.0L;
  const auto add = [&](long double v) {
    const long double s = sum + v;
    comp += std::fabs(sum) >= std::fabs(v) ? (sum - s) + v : (v - s) + sum;
    sum = s;
  };
  for (std::size_t n = 1; n <= factors.size(); ++n) {
    term *= static_cast<long double>(-t) / static_cast<long double>(n) * factors[n - 1];
    add(term);
    largest = std::max(largest, std::fabs(term));
    const double ratio = std::abs(t) * kmax / static_cast<double>(n + 1);
    if (ratio < 1.0) {
      const double remainder = static_cast<double>(std::fabs(term)) * ratio / (1.0 - ratio);
      if (remainder < 1e-2 * kBudget) {
        const double rounding = static_cast<double>(largest) * static_cast<double>(n) * 1.1e-19;
        if (rounding > kBudget)
          throw ConvergenceError("moment_series: cancellation exceeds the error budget");
        return static_cast<double>(sum + comp);
      }
    }
  }
  throw ConvergenceError("moment_series: series did not converge within the term cap");
}

LimitMeasureRho rho_moments(const KappaFunction& kappa, double alpha, std::size_t max_k) {
  if (!(alpha > 0.0)) throw DomainError("rho_moments: alpha must be positive");
  if (kappa.law().metadata().geometric) throw PreconditionError("rho_moments: law is geometric");
  const double p_star = kappa.malthusian();
  const double base = alpha * kappa.derivative(p_star, 1);
  LimitMeasureRho rho{alpha, {}};
  double factorial = 1.0, product = 1.0;
  for (std::size_t k = 1; k <= max_k; ++k) {
    if (k > 1) {
      factorial *= static_cast<double>(k - 1);
      product *= kappa(p_star + static_cast<double>(k - 1) * alpha);
    }
    rho.moments.push_back(factorial / (base * product));
  }
  return rho;
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol);
}

double exit_density(const KappaFunction& kappa, double x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("exit_density: x must lie in (0, 1)");
  if (kappa.law().metadata().geometric) throw PreconditionError("exit_density: law is geometric");
  const double p_star = kappa.malthusian();
  const auto& law = kappa.law();
  double partial;
  if (auto closed = law.partial_moment_closed(p_star, x)) {
    partial = *closed;
  } else {
    partial = monte_carlo_over_law(law, [&](const MassPartition& s) {
                double total = 0.0;
                for (double l : s.log_sizes())
                  if (std::exp(l) < x) total += std::exp(p_star * l);
                return total;
              }).value;
  }
  return partial / (x * kappa.derivative(p_star, 1));
}

ExitMeasureModel::ExitMeasureModel(KappaFunction kappa) : kappa_(std::move(kappa)) {
  if (kappa_.law().metadata().geometric) throw PreconditionError("exit measure: law is geometric");
  p_star_ = kappa_.malthusian();
  kappa_prime_ = kappa_.derivative(p_star_, 1);
  normalization_ = cdf(1.0);
}

double ExitMeasureModel::density(double x) const { return exit_density(kappa_, x); }

double ExitMeasureModel::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  const double upper = std::min(x, 1.0);
  return integrate([this](double y) { return y <= 0.0 || y >= 1.0 ? 0.0 : density(y); }, 0.0, upper,
                   1e-11);
}

double tagged_laplace(const KappaFunction& kappa, double q, double t) {
  if (!(q > 0.0)) throw DomainError("tagged_laplace: q must be positive");
  if (!(t >= 0.0)) throw DomainError("tagged_laplace: t must be nonnegative");
  if (t == 0.0) return 1.0;
  return std::exp(-t * kappa(q + 1.0));
}

double reproduction_intensity(const DislocationLaw& law, double t) {
  if (!(t >= 0.0)) throw DomainError("reproduction_intensity: t must be nonnegative");
  if (auto closed = law.reproduction_closed(t)) return *closed;
  const double floor = -t;
  return monte_carlo_over_law(law, [floor](const MassPartition& s) {
           double count = 0.0;
           for (double l : s.log_sizes()) count += l >= floor ? 1.0 : 0.0;
           return count;
         }).value;
}

}  // namespace fragchain
